//! Riemann theta function by truncated lattice sum, with directional
//! derivatives of arbitrary order, and the Klein sigma / zeta / wp layer
//! built on top of it.
//!
//! The lattice radius comes from the Gaussian tail bound: with `l_min` the
//! smallest eigenvalue of `pi Im(T)`, a cutoff `R = ceil(sqrt(-log eps /
//! l_min))` plus one unit per derivative order keeps the dropped tail
//! below `eps` times a modest prefactor.

use num_complex::Complex64;

use crate::curve::CurveModel;
use crate::linalg::{cinvert, cmat_vec, min_eig_sym_real, CMat};
use crate::periods::PeriodData;
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Evaluation context: normalised period matrix plus lattice cutoff.
#[derive(Debug, Clone)]
pub struct ThetaContext {
    pub t_norm: CMat,
    pub radius: i64,
    pub tail_tol: f64,
}

impl ThetaContext {
    /// Builds a context able to deliver derivatives up to `max_order`.
    pub fn new(t_norm: CMat, tail_tol: f64, max_order: usize) -> Result<ThetaContext> {
        let im: CMat = t_norm
            .iter()
            .map(|r| r.iter().map(|c| Complex64::new(c.im * PI, 0.0)).collect())
            .collect();
        let lmin = min_eig_sym_real(&im);
        if lmin <= 0.0 {
            return Err(Error::validation(format!(
                "Im(T) must be positive definite (min eigenvalue {:.3e})",
                lmin / PI
            )));
        }
        let base = (-(tail_tol.ln()) / lmin).sqrt().ceil() as i64;
        let radius = base + max_order as i64 + 2;
        Ok(ThetaContext { t_norm, radius, tail_tol })
    }

    pub fn genus(&self) -> usize {
        self.t_norm.len()
    }

    pub fn for_periods(pd: &PeriodData, tail_tol: f64, max_order: usize) -> Result<ThetaContext> {
        ThetaContext::new(pd.t_norm()?, tail_tol, max_order)
    }
}

/// Lattice sum at a fixed argument, caching the per-point exponentials so
/// that many derivative evaluations at the same `z` stay cheap.
pub struct ThetaSum {
    /// (lattice vector, exp(i pi m^T T m + 2 i pi m^T z))
    terms: Vec<(Vec<i64>, Complex64)>,
}

impl ThetaSum {
    pub fn new(ctx: &ThetaContext, z: &[Complex64]) -> ThetaSum {
        let g = ctx.genus();
        assert_eq!(z.len(), g);
        let r = ctx.radius;
        let mut m = vec![-r; g];
        let mut terms = Vec::new();
        loop {
            let mut quad = Complex64::new(0.0, 0.0);
            for i in 0..g {
                for j in 0..g {
                    quad += ctx.t_norm[i][j] * (m[i] * m[j]) as f64;
                }
            }
            let mut lin = Complex64::new(0.0, 0.0);
            for i in 0..g {
                lin += z[i] * m[i] as f64;
            }
            let e = (Complex64::new(0.0, PI) * quad + Complex64::new(0.0, 2.0 * PI) * lin).exp();
            terms.push((m.clone(), e));
            // odometer over the cube [-r, r]^g
            let mut k = 0;
            loop {
                if k == g {
                    return ThetaSum { terms };
                }
                m[k] += 1;
                if m[k] <= r {
                    break;
                }
                m[k] = -r;
                k += 1;
            }
        }
    }

    pub fn value(&self) -> Complex64 {
        self.terms.iter().map(|(_, e)| *e).sum()
    }

    /// Largest term magnitude, used as the scale for divisor detection.
    pub fn scale(&self) -> f64 {
        self.terms.iter().map(|(_, e)| e.norm()).fold(0.0, f64::max)
    }

    /// Directional derivative `prod_k nabla_(dirs[k]) theta(z)`: each
    /// direction contributes a factor `2 pi i <m, d>` inside the sum.
    pub fn dirderiv(&self, dirs: &[&[Complex64]]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, e) in &self.terms {
            let mut f = *e;
            for d in dirs {
                let mut dot = Complex64::new(0.0, 0.0);
                for (mi, di) in m.iter().zip(d.iter()) {
                    dot += di * *mi as f64;
                }
                f *= Complex64::new(0.0, 2.0 * PI) * dot;
            }
            acc += f;
        }
        acc
    }

    /// Mixed partial derivative for a multi-index `alpha` over coordinates.
    pub fn partial(&self, alpha: &[usize]) -> Complex64 {
        let g = alpha.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, e) in &self.terms {
            let mut f = *e;
            for i in 0..g {
                for _ in 0..alpha[i] {
                    f *= Complex64::new(0.0, 2.0 * PI) * m[i] as f64;
                }
            }
            acc += f;
        }
        acc
    }
}

pub fn theta(z: &[Complex64], ctx: &ThetaContext) -> Complex64 {
    ThetaSum::new(ctx, z).value()
}

pub fn theta_deriv(z: &[Complex64], ctx: &ThetaContext, alpha: &[usize]) -> Complex64 {
    assert!(alpha.iter().sum::<usize>() <= 16, "derivative order above engine bound");
    ThetaSum::new(ctx, z).partial(alpha)
}

/// Klein sigma function `sigma(v) = theta(A^-1 v) exp(v^T kappa v / 2)`,
/// with the modular constant fixed to 1.
pub fn sigma(v: &[Complex64], pd: &PeriodData, ctx: &ThetaContext) -> Result<Complex64> {
    let ainv = cinvert(&pd.a_mat, "period matrix A")?;
    let z = cmat_vec(&ainv, v);
    let kappa = pd.kappa()?;
    let mut quad = Complex64::new(0.0, 0.0);
    for i in 0..pd.g {
        for j in 0..pd.g {
            quad += v[i] * kappa[i][j] * v[j];
        }
    }
    Ok(theta(&z, ctx) * (quad / 2.0).exp())
}

/// Kleinian function values at one point: zeta and the wp tensors up to
/// the requested order (2..=5).
#[derive(Debug, Clone)]
pub struct KleinPoint {
    pub g: usize,
    pub v: Vec<Complex64>,
    pub sigma: Complex64,
    pub zeta: Vec<Complex64>,
    wp2: Vec<Complex64>,
    wp3: Option<Vec<Complex64>>,
    wp4: Option<Vec<Complex64>>,
    wp5: Option<Vec<Complex64>>,
}

impl KleinPoint {
    pub fn wp2(&self, i: usize, j: usize) -> Complex64 {
        self.wp2[i * self.g + j]
    }

    pub fn wp3(&self, i: usize, j: usize, k: usize) -> Complex64 {
        let g = self.g;
        self.wp3.as_ref().expect("order 3 not computed")[(i * g + j) * g + k]
    }

    pub fn wp4(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        let g = self.g;
        self.wp4.as_ref().expect("order 4 not computed")[((i * g + j) * g + k) * g + l]
    }

    pub fn wp5(&self, idx: [usize; 5]) -> Complex64 {
        let g = self.g;
        let flat = idx.iter().fold(0usize, |acc, &i| acc * g + i);
        self.wp5.as_ref().expect("order 5 not computed")[flat]
    }
}

/// Enumerates the set partitions of `items`, invoking `f` on each.
fn set_partitions(items: &[usize], f: &mut impl FnMut(&[Vec<usize>])) {
    fn rec(rest: &[usize], blocks: &mut Vec<Vec<usize>>, f: &mut impl FnMut(&[Vec<usize>])) {
        if rest.is_empty() {
            f(blocks);
            return;
        }
        let first = rest[0];
        let tail = &rest[1..];
        for bi in 0..blocks.len() {
            blocks[bi].push(first);
            rec(tail, blocks, f);
            blocks[bi].pop();
        }
        blocks.push(vec![first]);
        rec(tail, blocks, f);
        blocks.pop();
    }
    rec(items, &mut Vec::new(), f);
}

/// Logarithmic-derivative tensors of `f(v) = theta(A^-1 v)` up to
/// `max_order`, from raw directional derivatives by the set-partition
/// (cumulant) recursion.
fn log_tensors(
    sum: &ThetaSum,
    dirs: &[Vec<Complex64>],
    theta0: Complex64,
    max_order: usize,
) -> Vec<Vec<Complex64>> {
    let g = dirs.len();
    let mut raw: Vec<Vec<Complex64>> = Vec::with_capacity(max_order);
    for order in 1..=max_order {
        let mut t = vec![Complex64::new(0.0, 0.0); g.pow(order as u32)];
        for_sorted_indices(g, order, |idx| {
            let dd: Vec<&[Complex64]> = idx.iter().map(|&i| dirs[i].as_slice()).collect();
            let val = sum.dirderiv(&dd);
            fill_symmetric(&mut t, g, idx, val);
        });
        raw.push(t);
    }

    let mut logt: Vec<Vec<Complex64>> = Vec::with_capacity(max_order);
    for order in 1..=max_order {
        let mut t = vec![Complex64::new(0.0, 0.0); g.pow(order as u32)];
        for_sorted_indices(g, order, |idx| {
            // L(S) = raw(S)/theta0 - sum over partitions with >= 2 blocks
            let mut val = raw[order - 1][flat_index(g, idx)] / theta0;
            let items: Vec<usize> = (0..order).collect();
            set_partitions(&items, &mut |blocks| {
                if blocks.len() < 2 {
                    return;
                }
                let mut prod = Complex64::new(1.0, 0.0);
                for b in blocks {
                    let sub: Vec<usize> = b.iter().map(|&p| idx[p]).collect();
                    prod *= logt[b.len() - 1][flat_index(g, &sub)];
                }
                val -= prod;
            });
            fill_symmetric(&mut t, g, idx, val);
        });
        logt.push(t);
    }
    logt
}

/// Visits every weakly increasing index tuple of the given length.
fn for_sorted_indices(g: usize, order: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; order];
    loop {
        if idx.windows(2).all(|w| w[0] <= w[1]) {
            f(&idx);
        }
        let mut k = order;
        while k > 0 {
            k -= 1;
            idx[k] += 1;
            if idx[k] < g {
                break;
            }
            idx[k] = 0;
            if k == 0 {
                return;
            }
        }
    }
}

fn flat_index(g: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0usize, |acc, &i| acc * g + i)
}

fn fill_symmetric(t: &mut [Complex64], g: usize, idx: &[usize], val: Complex64) {
    let mut perm = idx.to_vec();
    perm.sort_unstable();
    loop {
        t[flat_index(g, &perm)] = val;
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Floor below which theta at the evaluation point counts as lying on the
/// divisor, relative to the largest lattice term.
const DIVISOR_FLOOR: f64 = 1e-10;

/// Evaluates zeta and the Kleinian wp tensors at `v` from analytic theta
/// derivatives (no finite differences).
pub fn wp_values(
    v: &[Complex64],
    pd: &PeriodData,
    ctx: &ThetaContext,
    max_order: usize,
) -> Result<KleinPoint> {
    assert!((2..=5).contains(&max_order));
    let g = pd.g;
    let ainv = cinvert(&pd.a_mat, "period matrix A")?;
    let z = cmat_vec(&ainv, v);
    let kappa = pd.kappa()?;
    let sum = ThetaSum::new(ctx, &z);
    let theta0 = sum.value();
    if theta0.norm() < DIVISOR_FLOOR * sum.scale().max(1.0) {
        return Err(Error::DivisorPoint);
    }

    // d/dv_i acts on theta's argument along column i of A^-1
    let dirs: Vec<Vec<Complex64>> = (0..g).map(|i| (0..g).map(|a| ainv[a][i]).collect()).collect();
    let logt = log_tensors(&sum, &dirs, theta0, max_order);

    let sigma_val = {
        let mut quad = Complex64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                quad += v[i] * kappa[i][j] * v[j];
            }
        }
        theta0 * (quad / 2.0).exp()
    };

    let kv = cmat_vec(&kappa, v);
    let zeta: Vec<Complex64> = (0..g).map(|k| kv[k] + logt[0][k]).collect();
    let wp2: Vec<Complex64> = (0..g * g)
        .map(|f| {
            let (i, j) = (f / g, f % g);
            -kappa[i][j] - logt[1][f]
        })
        .collect();
    let wp3 = (max_order >= 3).then(|| logt[2].iter().map(|c| -c).collect());
    let wp4 = (max_order >= 4).then(|| logt[3].iter().map(|c| -c).collect());
    let wp5 = (max_order >= 5).then(|| logt[4].iter().map(|c| -c).collect());

    Ok(KleinPoint { g, v: v.to_vec(), sigma: sigma_val, zeta, wp2, wp3, wp4, wp5 })
}

/// Convenience wrapper building the context from the period data.
pub fn wp_values_default(v: &[Complex64], pd: &PeriodData, max_order: usize) -> Result<KleinPoint> {
    let ctx = ThetaContext::for_periods(pd, 1e-14, max_order)?;
    wp_values(v, pd, &ctx, max_order)
}

/// Builds a Klein point for a curve/periods pair (the curve only fixes
/// the expected genus).
pub fn klein_point(
    curve: &CurveModel,
    pd: &PeriodData,
    v: &[Complex64],
    max_order: usize,
) -> Result<KleinPoint> {
    if curve.genus() != pd.g {
        return Err(Error::validation("curve and period data disagree on genus"));
    }
    wp_values_default(v, pd, max_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::HyperellipticCurve;
    use crate::periods::hyperelliptic_periods;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn test_pd() -> PeriodData {
        let curve = HyperellipticCurve::from_branch_points(vec![-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
        hyperelliptic_periods(&curve).unwrap()
    }

    fn test_ctx(pd: &PeriodData, order: usize) -> ThetaContext {
        ThetaContext::for_periods(pd, 1e-14, order).unwrap()
    }

    #[test]
    fn theta_quasi_periodicity() {
        let pd = test_pd();
        let ctx = test_ctx(&pd, 0);
        let z = [c(0.23, 0.11), c(-0.17, 0.05)];
        let t0 = theta(&z, &ctx);
        // integer shift
        let zn = [z[0] + 1.0, z[1] - 2.0];
        assert!((theta(&zn, &ctx) - t0).norm() < 1e-10 * t0.norm().max(1.0));
        // parity
        let zm = [-z[0], -z[1]];
        assert!((theta(&zm, &ctx) - t0).norm() < 1e-12 * t0.norm().max(1.0));
        // theta(z + T n) = exp(-i pi (n^T T n + 2 z^T n)) theta(z)
        let t = &ctx.t_norm;
        let n = [1i64, -1i64];
        let zt = [
            z[0] + t[0][0] * n[0] as f64 + t[0][1] * n[1] as f64,
            z[1] + t[1][0] * n[0] as f64 + t[1][1] * n[1] as f64,
        ];
        let mut quad = c(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                quad += t[i][j] * (n[i] * n[j]) as f64;
            }
        }
        let mut lin = c(0.0, 0.0);
        for i in 0..2 {
            lin += z[i] * n[i] as f64;
        }
        let factor = (Complex64::new(0.0, -PI) * (quad + 2.0 * lin)).exp();
        let lhs = theta(&zt, &ctx);
        let rhs = factor * theta(&z, &ctx);
        assert!((lhs - rhs).norm() < 1e-8 * rhs.norm());
    }

    #[test]
    fn theta_derivative_against_finite_differences() {
        let pd = test_pd();
        let ctx = test_ctx(&pd, 4);
        let z = [c(0.13, 0.21), c(0.4, -0.07)];
        let d1 = theta_deriv(&z, &ctx, &[1, 0]);
        let h = 1e-5;
        let fd = (theta(&[z[0] + h, z[1]], &ctx) - theta(&[z[0] - h, z[1]], &ctx)) / (2.0 * h);
        assert!((d1 - fd).norm() < 1e-6 * d1.norm().max(1.0));

        let d2 = theta_deriv(&z, &ctx, &[1, 1]);
        let h2 = 1e-4;
        let f = |a: f64, b: f64| theta(&[z[0] + a, z[1] + b], &ctx);
        let fd2 = (f(h2, h2) - f(h2, -h2) - f(-h2, h2) + f(-h2, -h2)) / (4.0 * h2 * h2);
        assert!((d2 - fd2).norm() < 1e-5 * d2.norm().max(1.0));

        assert_eq!(theta_deriv(&z, &ctx, &[0, 0]), theta(&z, &ctx));

        // odd total order at z = 0 vanishes by parity
        let zero = [c(0.0, 0.0), c(0.0, 0.0)];
        let odd = theta_deriv(&zero, &ctx, &[2, 1]);
        assert!(odd.norm() < 1e-12 * theta(&zero, &ctx).norm().max(1.0));
    }

    #[test]
    fn sigma_evenness() {
        let pd = test_pd();
        let ctx = test_ctx(&pd, 2);
        let v = [c(0.31, 0.12), c(-0.42, 0.2)];
        let s1 = sigma(&v, &pd, &ctx).unwrap();
        let s2 = sigma(&[-v[0], -v[1]], &pd, &ctx).unwrap();
        assert!((s1 - s2).norm() < 1e-10 * s1.norm());
    }

    #[test]
    fn wp_symmetry_and_consistency() {
        let pd = test_pd();
        let ctx = test_ctx(&pd, 5);
        let v = [c(0.31, 0.12), c(-0.42, 0.2)];
        let kp = wp_values(&v, &pd, &ctx, 5).unwrap();

        assert_eq!(kp.wp2(0, 1), kp.wp2(1, 0));
        assert_eq!(kp.wp3(0, 1, 1), kp.wp3(1, 1, 0));
        assert_eq!(kp.wp4(0, 0, 1, 1), kp.wp4(1, 0, 1, 0));

        // d/dv_0 of wp2_(01) matches wp3_(001) (finite differences)
        let h = 1e-5;
        let kpp = wp_values(&[v[0] + h, v[1]], &pd, &ctx, 2).unwrap();
        let kpm = wp_values(&[v[0] - h, v[1]], &pd, &ctx, 2).unwrap();
        let fd = (kpp.wp2(0, 1) - kpm.wp2(0, 1)) / (2.0 * h);
        assert!((fd - kp.wp3(0, 0, 1)).norm() < 1e-6 * kp.wp3(0, 0, 1).norm().max(1.0));

        // second log-derivative of sigma matches wp2; first matches zeta
        let f = |dv0: f64, dv1: f64| sigma(&[v[0] + dv0, v[1] + dv1], &pd, &ctx).unwrap().ln();
        let h2 = 1e-5;
        let d00 = (f(h2, 0.0) - 2.0 * f(0.0, 0.0) + f(-h2, 0.0)) / (h2 * h2);
        assert!((-d00 - kp.wp2(0, 0)).norm() < 1e-5 * kp.wp2(0, 0).norm().max(1.0));
        let dz = (f(h2, 0.0) - f(-h2, 0.0)) / (2.0 * h2);
        assert!((dz - kp.zeta[0]).norm() < 1e-7 * kp.zeta[0].norm().max(1.0));
    }

    #[test]
    fn wp_lattice_periodicity() {
        let pd = test_pd();
        let ctx = test_ctx(&pd, 2);
        let v = [c(0.31, 0.12), c(-0.42, 0.2)];
        let kp = wp_values(&v, &pd, &ctx, 2).unwrap();
        for mat in [&pd.a_mat, &pd.b_mat] {
            for col in 0..2 {
                let vs = [v[0] + mat[0][col], v[1] + mat[1][col]];
                let kps = wp_values(&vs, &pd, &ctx, 2).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        let a = kp.wp2(i, j);
                        let b = kps.wp2(i, j);
                        assert!(
                            (a - b).norm() < 1e-7 * a.norm().max(1.0),
                            "wp{i}{j} changed along lattice"
                        );
                    }
                }
            }
        }
        // zeta quasi-period increments are v-independent
        let w = [c(-0.11, 0.33), c(0.21, -0.14)];
        let kpw = wp_values(&w, &pd, &ctx, 2).unwrap();
        for col in 0..2 {
            let vs = [v[0] + pd.a_mat[0][col], v[1] + pd.a_mat[1][col]];
            let ws = [w[0] + pd.a_mat[0][col], w[1] + pd.a_mat[1][col]];
            let kvs = wp_values(&vs, &pd, &ctx, 2).unwrap();
            let kws = wp_values(&ws, &pd, &ctx, 2).unwrap();
            for k in 0..2 {
                let inc_v = kvs.zeta[k] - kp.zeta[k];
                let inc_w = kws.zeta[k] - kpw.zeta[k];
                assert!(
                    (inc_v - inc_w).norm() < 1e-7 * inc_v.norm().max(1.0),
                    "zeta quasi-period not constant"
                );
            }
        }
    }

    #[test]
    fn external_period_data_roundtrip_feeds_wp() {
        let pd = test_pd();
        let back = PeriodData::from_json(&pd.to_json()).unwrap();
        back.validate(1e-8).unwrap();
        let _ = wp_values_default(&[c(0.2, 0.1), c(0.1, -0.2)], &back, 3).unwrap();
    }
}
