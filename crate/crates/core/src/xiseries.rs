//! Truncated Laurent series in the local parameter `xi` at infinity, and
//! dense bivariate Taylor triangles in `(xi, eta)`, both generic over the
//! coefficient ring (numeric or symbolic).
//!
//! These are the workhorses behind local expansions of curve coordinates,
//! differentials, and the bivariate expansion of the algebraic part of the
//! fundamental bi-differential.

use crate::scalar::Scalar;

/// Value `sum_i c[i] * xi^{lead + i}`; coefficients beyond `c.len()` are
/// unknown (truncated), not zero.  The zero series has an empty `c`.
#[derive(Debug, Clone)]
pub struct XiSeries<S> {
    pub lead: i32,
    pub c: Vec<S>,
}

impl<S: Scalar> XiSeries<S> {
    pub fn zero(proto: &S, len: usize) -> XiSeries<S> {
        XiSeries { lead: 0, c: vec![proto.zero(); len] }
    }

    /// The monomial `coef * xi^k`, carried to `len` coefficients.
    pub fn monomial(proto: &S, coef: S, k: i32, len: usize) -> XiSeries<S> {
        let mut s = XiSeries { lead: k, c: vec![proto.zero(); len] };
        s.c[0] = coef;
        s
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    /// First exponent beyond the stored window.
    pub fn order_bound(&self) -> i32 {
        self.lead + self.c.len() as i32
    }

    pub fn coeff(&self, k: i32) -> S {
        let proto = self.c.first().expect("empty series");
        if k < self.lead {
            return proto.zero();
        }
        let idx = (k - self.lead) as usize;
        assert!(idx < self.c.len(), "coefficient beyond truncation");
        self.c[idx].clone()
    }

    /// Drops leading zero coefficients, keeping the order bound.
    pub fn normalize(&mut self) {
        let mut shift = 0;
        while shift < self.c.len() && self.c[shift].is_zero() {
            shift += 1;
        }
        if shift > 0 {
            self.lead += shift as i32;
            self.c.drain(..shift);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, f: &S) -> XiSeries<S> {
        XiSeries { lead: self.lead, c: self.c.iter().map(|x| x.mul(f)).collect() }
    }

    pub fn neg(&self) -> XiSeries<S> {
        XiSeries { lead: self.lead, c: self.c.iter().map(|x| x.neg()).collect() }
    }

    pub fn add(&self, other: &XiSeries<S>) -> XiSeries<S> {
        let proto = &self.c[0];
        let lead = self.lead.min(other.lead);
        let bound = self.order_bound().min(other.order_bound());
        assert!(bound > lead, "series windows do not overlap");
        let len = (bound - lead) as usize;
        let mut c = vec![proto.zero(); len];
        for (i, slot) in c.iter_mut().enumerate() {
            let k = lead + i as i32;
            let mut v = proto.zero();
            if k >= self.lead && k < self.order_bound() {
                v = v.add(&self.c[(k - self.lead) as usize]);
            }
            if k >= other.lead && k < other.order_bound() {
                v = v.add(&other.c[(k - other.lead) as usize]);
            }
            *slot = v;
        }
        XiSeries { lead, c }
    }

    pub fn sub(&self, other: &XiSeries<S>) -> XiSeries<S> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &XiSeries<S>) -> XiSeries<S> {
        let proto = &self.c[0];
        let mut a = self.clone();
        let mut b = other.clone();
        a.normalize();
        b.normalize();
        if a.is_zero() || b.is_zero() {
            // preserve a conservative window
            let lead = a.lead + b.lead;
            return XiSeries { lead, c: vec![proto.zero(); a.len().min(b.len()).max(1)] };
        }
        let len = a.len().min(b.len());
        let mut c = vec![proto.zero(); len];
        for i in 0..a.len().min(len) {
            if a.c[i].is_zero() {
                continue;
            }
            for j in 0..b.len() {
                if i + j >= len {
                    break;
                }
                c[i + j] = c[i + j].add(&a.c[i].mul(&b.c[j]));
            }
        }
        XiSeries { lead: a.lead + b.lead, c }
    }

    pub fn pow(&self, e: u32, proto: &S) -> XiSeries<S> {
        let mut acc = XiSeries::monomial(proto, proto.one(), 0, self.len());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse; the leading coefficient must be a unit.
    pub fn invert(&self) -> XiSeries<S> {
        let mut a = self.clone();
        a.normalize();
        assert!(!a.is_zero(), "cannot invert zero series");
        let proto = &a.c[0];
        let inv0 = a.c[0].try_invert().expect("leading coefficient is not a unit");
        let len = a.len();
        let mut c = vec![proto.zero(); len];
        c[0] = inv0.clone();
        for k in 1..len {
            // sum_{j=0..k} a_j * inv_{k-j} = 0
            let mut acc = proto.zero();
            for j in 1..=k {
                if a.c[j].is_zero() {
                    continue;
                }
                acc = acc.add(&a.c[j].mul(&c[k - j]));
            }
            c[k] = acc.neg().mul(&inv0);
        }
        XiSeries { lead: -a.lead, c }
    }

    /// `log` of a series with constant term one (lead 0, c[0] = 1).
    pub fn log_unit(&self) -> XiSeries<S> {
        assert_eq!(self.lead, 0);
        let proto = &self.c[0];
        assert!(self.c[0].sub(&proto.one()).is_zero(), "log_unit needs constant term 1");
        // L' = f'/f integrated termwise
        let fp = self.derivative();
        let ratio = fp.mul(&self.invert());
        ratio.integrate(proto)
    }

    /// `exp` of a series with zero constant term.
    pub fn exp_unit(&self) -> XiSeries<S> {
        let proto = &self.c[0];
        assert!(self.lead >= 0);
        let len = self.len() + self.lead.max(0) as usize;
        let g = |k: usize| -> S {
            let k = k as i32;
            if k < self.lead || k >= self.order_bound() {
                proto.zero()
            } else {
                self.c[(k - self.lead) as usize].clone()
            }
        };
        assert!(g(0).is_zero(), "exp_unit needs zero constant term");
        let mut e = vec![proto.zero(); len];
        e[0] = proto.one();
        for k in 1..len {
            // k e_k = sum_{j=1..k} j g_j e_{k-j}
            let mut acc = proto.zero();
            for j in 1..=k {
                let gj = g(j);
                if gj.is_zero() {
                    continue;
                }
                acc = acc.add(&gj.mul(&e[k - j]).mul(&proto.from_ratio(j as i64, 1)));
            }
            e[k] = acc.mul(&proto.from_ratio(1, k as i64));
        }
        XiSeries { lead: 0, c: e }
    }

    /// `m`-th root of a series of the form `xi^(m*k) * (1 + ...)`.
    pub fn root_unit(&self, m: u32) -> XiSeries<S> {
        let mut a = self.clone();
        a.normalize();
        let proto = &a.c[0];
        assert!(a.lead % m as i32 == 0, "lead not divisible by root order");
        assert!(a.c[0].sub(&proto.one()).is_zero(), "root_unit needs unit part 1");
        let lead = a.lead / m as i32;
        let unit = XiSeries { lead: 0, c: a.c.clone() };
        let mut log = unit.log_unit();
        log = log.scale(&proto.from_ratio(1, m as i64));
        let mut r = log.exp_unit();
        r.lead += lead;
        r
    }

    pub fn derivative(&self) -> XiSeries<S> {
        let proto = &self.c[0];
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(i, x)| x.mul(&proto.from_ratio(self.lead as i64 + i as i64, 1)))
            .collect();
        XiSeries { lead: self.lead - 1, c }
    }

    /// Antiderivative without constant; panics if a `xi^-1` term is present.
    pub fn integrate(&self, proto: &S) -> XiSeries<S> {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let k = self.lead as i64 + i as i64;
                if k == -1 {
                    assert!(x.is_zero(), "residue obstructs integration");
                    proto.zero()
                } else {
                    x.mul(&proto.from_ratio(1, k + 1))
                }
            })
            .collect();
        XiSeries { lead: self.lead + 1, c }
    }

    /// Coefficient of `xi^-1`.
    pub fn residue(&self) -> S {
        let proto = &self.c[0];
        if -1 < self.lead || -1 >= self.order_bound() {
            return proto.zero();
        }
        self.coeff(-1)
    }

    pub fn truncate(&mut self, len: usize) {
        self.c.truncate(len);
    }
}

/// Dense bivariate Taylor triangle: coefficients of `xi^i eta^j` for
/// `i + j < size`.  Entries outside the triangle are unknown.
#[derive(Debug, Clone)]
pub struct BiTriangle<S> {
    pub size: usize,
    pub a: Vec<Vec<S>>,
}

impl<S: Scalar> BiTriangle<S> {
    pub fn zero(proto: &S, size: usize) -> BiTriangle<S> {
        let a = (0..size).map(|i| vec![proto.zero(); size - i]).collect();
        BiTriangle { size, a }
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.a[i][j]
    }

    /// Adds `u(xi) * v(eta)` over the triangle; both factors must cover
    /// exponents `0..size`.
    pub fn add_outer(&mut self, u: &XiSeries<S>, v: &XiSeries<S>) {
        for i in 0..self.size {
            let ui = if (i as i32) < u.lead {
                continue;
            } else {
                u.coeff(i as i32)
            };
            if ui.is_zero() {
                continue;
            }
            for j in 0..self.size - i {
                if (j as i32) < v.lead {
                    continue;
                }
                let vj = v.coeff(j as i32);
                if vj.is_zero() {
                    continue;
                }
                self.a[i][j] = self.a[i][j].add(&ui.mul(&vj));
            }
        }
    }

    /// Exact division by the homogeneous polynomial
    /// `G = sum_{k=0}^{n-1} xi^k eta^{n-1-k}` (unit coefficient on
    /// `eta^{n-1}`), reducing the valid triangle by `n-1`.
    pub fn div_cyclic_vandermonde(&self, n: usize, proto: &S) -> BiTriangle<S> {
        let d = n - 1;
        assert!(self.size > d);
        let size = self.size - d;
        let mut q = BiTriangle::zero(proto, size);
        for i in 0..size {
            for j in 0..size - i {
                // f_{i, j+d} = sum_{k=0}^{d} q_{i-k, j+k}
                let mut acc = self.a[i][j + d].clone();
                for k in 1..=d.min(i) {
                    acc = acc.sub(&q.a[i - k][j + k]);
                }
                q.a[i][j] = acc;
            }
        }
        q
    }

    /// Exact division by `(eta - xi)`, reducing the triangle by one.
    pub fn div_eta_minus_xi(&self, proto: &S) -> BiTriangle<S> {
        assert!(self.size > 1);
        let size = self.size - 1;
        let mut q = BiTriangle::zero(proto, size);
        for i in 0..size {
            for j in 0..size - i {
                // q_{i,j} = f_{i, j+1} + q_{i-1, j+1}
                let mut acc = self.a[i][j + 1].clone();
                if i > 0 {
                    acc = acc.add(&q.a[i - 1][j + 1]);
                }
                q.a[i][j] = acc;
            }
        }
        q
    }

    /// Verifies the division `self = q * (eta - xi)` on `q`'s triangle;
    /// returns the residual terms that fail (used as an exactness check).
    pub fn check_eta_minus_xi(&self, q: &BiTriangle<S>) -> bool {
        // f_{i,j} = q_{i,j-1} - q_{i-1,j} for i+j < q.size
        for i in 0..q.size {
            for j in 0..q.size - i {
                let mut v = self.a[i][j].clone();
                if j > 0 {
                    v = v.sub(&q.a[i][j - 1]);
                }
                if i > 0 {
                    v = v.add(&q.a[i - 1][j]);
                }
                if !v.is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn invert_and_root() {
        let proto = c(0.0);
        // f = 1 + 2 xi + xi^2
        let f = XiSeries { lead: 0, c: vec![c(1.0), c(2.0), c(1.0), c(0.0), c(0.0), c(0.0)] };
        let inv = f.invert();
        let prod = f.mul(&inv);
        assert_eq!(prod.lead, 0);
        assert!((prod.c[0] - c(1.0)).norm() < 1e-14);
        for k in 1..prod.len() {
            assert!(prod.c[k].norm() < 1e-13);
        }
        // sqrt(1 + 2xi + xi^2) = 1 + xi
        let r = f.root_unit(2);
        assert!((r.coeff(0) - c(1.0)).norm() < 1e-13);
        assert!((r.coeff(1) - c(1.0)).norm() < 1e-13);
        assert!(r.coeff(2).norm() < 1e-13);
        let _ = proto;
    }

    #[test]
    fn bitriangle_divisions() {
        let proto = c(0.0);
        // f = (eta - xi)^2 * (xi + eta) -- divide out and recover
        let mut f = BiTriangle::zero(&proto, 6);
        // (eta-xi)^2 (xi+eta) = xi^3 + eta^3 - xi^2 eta - xi eta^2
        for (i, j, v) in [(3, 0, 1.0), (0, 3, 1.0), (2, 1, -1.0), (1, 2, -1.0)] {
            f.a[i][j] += c(v);
        }
        let q1 = f.div_eta_minus_xi(&proto);
        assert!(f.check_eta_minus_xi(&q1));
        let q2 = q1.div_eta_minus_xi(&proto);
        // q2 should equal xi + eta on its triangle
        assert!((q2.a[1][0] - c(1.0)).norm() < 1e-14);
        assert!((q2.a[0][1] - c(1.0)).norm() < 1e-14);
        assert!(q2.a[0][0].norm() < 1e-14);

        // division by G for n = 2 (G = xi + eta): (xi+eta)*1 / G = 1
        let mut g = BiTriangle::zero(&proto, 4);
        g.a[1][0] = c(1.0);
        g.a[0][1] = c(1.0);
        let one = g.div_cyclic_vandermonde(2, &proto);
        assert!((one.a[0][0] - c(1.0)).norm() < 1e-14);
        assert!(one.a[1][0].norm() < 1e-14);
    }
}
