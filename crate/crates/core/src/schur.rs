//! Exact symmetric-function layer over the flow variables `t_1..t_M`.
//!
//! Everything here is computed in exact rational arithmetic: complete
//! homogeneous polynomials from their generating function, Schur functions
//! through the Jacobi-Trudi determinant, the hook bilinear identity, and
//! the Schur differential pairing used to read Plucker coordinates off a
//! tau series.  An independent bialternant construction (ratio of
//! alternants in auxiliary variables, re-expressed through power sums)
//! serves as the brute-force oracle for the determinantal route.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::mono::{monomials_of_weight, Mono};
use crate::partitions::Partition;
use crate::series::TauSeries;
use crate::{Error, Result};

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Multivariate polynomial in `t_1..t_M` over exact rationals, graded by
/// `weight(t_k) = k`.  Monomials above the weight bound (`= M` by default)
/// are dropped eagerly by every operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactPoly {
    terms: BTreeMap<Mono, BigRational>,
    nvars: usize,
    wmax: u32,
}

impl ExactPoly {
    pub fn zero(nvars: usize) -> ExactPoly {
        ExactPoly { terms: BTreeMap::new(), nvars, wmax: nvars as u32 }
    }

    pub fn constant(nvars: usize, c: BigRational) -> ExactPoly {
        let mut p = ExactPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Mono::ONE, c);
        }
        p
    }

    pub fn one(nvars: usize) -> ExactPoly {
        ExactPoly::constant(nvars, BigRational::one())
    }

    /// The variable `t_k` (one-based).
    pub fn var(nvars: usize, k: usize) -> ExactPoly {
        assert!(k >= 1 && k <= nvars);
        let mut p = ExactPoly::zero(nvars);
        p.terms.insert(Mono::var(k), BigRational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Mono) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    fn insert(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() || m.weight() > self.wmax {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &ExactPoly) -> ExactPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &ExactPoly) -> ExactPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ExactPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> ExactPoly {
        if c.is_zero() {
            return ExactPoly::zero(self.nvars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c;
        }
        out
    }

    pub fn mul(&self, other: &ExactPoly) -> ExactPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = ExactPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            let wa = ma.weight();
            for (mb, cb) in &other.terms {
                if wa + mb.weight() > self.wmax {
                    continue;
                }
                out.insert(ma.mul(mb), ca.clone() * cb);
            }
        }
        out
    }

    /// Substitutes `t_k -> -t_k`, i.e. flips the sign of odd-degree terms.
    pub fn negate_vars(&self) -> ExactPoly {
        let mut out = ExactPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let c = if m.degree() % 2 == 1 { -c.clone() } else { c.clone() };
            out.insert(*m, c);
        }
        out
    }

    /// Evaluates with complex values `vals[k-1]` for `t_k`.
    pub fn eval_complex(&self, vals: &[Complex64]) -> Complex64 {
        assert!(vals.len() >= self.nvars);
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut term = Complex64::new(
                c.numer().to_f64().unwrap_or(f64::NAN),
                0.0,
            ) / c.denom().to_f64().unwrap_or(f64::NAN);
            for k in 1..=self.nvars {
                for _ in 0..m.exponent(k) {
                    term *= vals[k - 1];
                }
            }
            acc += term;
        }
        acc
    }

    /// Converts to a numeric truncated series with the given bounds.
    pub fn to_series(&self, m: usize, w: u32) -> TauSeries {
        let mut s = TauSeries::zero(m, w);
        for (mono, c) in &self.terms {
            if mono.weight() <= w {
                let v = rational_to_f64(c);
                s.add_to_coeff(*mono, Complex64::new(v, 0.0));
            }
        }
        s
    }
}

pub fn rational_to_f64(c: &BigRational) -> f64 {
    // Split to avoid overflow for large numerators/denominators.
    let n = c.numer().to_f64().unwrap_or(f64::NAN);
    let d = c.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Complete homogeneous polynomial `h_j`: the coefficient of `z^j` in
/// `exp(sum_i t_i z^i)`.  For `j < 0` this is zero by convention.
pub fn complete_homogeneous(j: i64, nvars: usize) -> ExactPoly {
    if j < 0 {
        return ExactPoly::zero(nvars);
    }
    let j = j as u32;
    assert!(nvars as u32 >= j, "need M >= j for an untruncated h_j");
    let mut out = ExactPoly::zero(nvars);
    // h_j = sum over exponent vectors m with weight j of prod t_k^{m_k} / m_k!
    for m in monomials_of_weight(nvars, j) {
        let mut denom = BigInt::one();
        for k in 1..=nvars {
            for f in 1..=m.exponent(k) as i64 {
                denom *= BigInt::from(f);
            }
        }
        out.insert(m, BigRational::new(BigInt::one(), denom));
    }
    out
}

/// Determinant of a square matrix of polynomials by expansion over column
/// subsets (O(2^n n) polynomial multiplications).
fn poly_det(mat: &[Vec<ExactPoly>], nvars: usize) -> ExactPoly {
    let n = mat.len();
    if n == 0 {
        return ExactPoly::one(nvars);
    }
    // states[mask] = signed sum over ways to fill the first popcount(mask)
    // rows using column set `mask`.
    let mut states: Vec<Option<ExactPoly>> = vec![None; 1 << n];
    states[0] = Some(ExactPoly::one(nvars));
    for mask in 0usize..(1 << n) {
        let Some(cur) = states[mask].clone() else { continue };
        if cur.is_zero() && mask != 0 {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for col in 0..n {
            if mask & (1 << col) != 0 || mat[row][col].is_zero() {
                continue;
            }
            // each already-used column above `col` is an inversion
            let used_above = (mask >> (col + 1)).count_ones();
            let mut term = cur.mul(&mat[row][col]);
            if used_above % 2 == 1 {
                term = term.neg();
            }
            let nm = mask | (1 << col);
            states[nm] = Some(match states[nm].take() {
                Some(acc) => acc.add(&term),
                None => term,
            });
        }
    }
    states[(1 << n) - 1].take().unwrap_or_else(|| ExactPoly::zero(nvars))
}

/// Schur function by the Jacobi-Trudi determinant
/// `det(h_{lambda_i - i + j})_{1<=i,j<=len}`.
pub fn schur_jacobi_trudi(lambda: &Partition, nvars: usize) -> ExactPoly {
    assert!(nvars as u32 >= lambda.weight(), "need M >= |lambda|");
    let n = lambda.len();
    if n == 0 {
        return ExactPoly::one(nvars);
    }
    let mat: Vec<Vec<ExactPoly>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    complete_homogeneous(lambda.part(i - 1) as i64 - i as i64 + j as i64, nvars)
                })
                .collect()
        })
        .collect();
    poly_det(&mat, nvars)
}

/// Hook Schur function via the bilinear identity
/// `s_(a|b) = (-1)^b sum_{j=1}^{b+1} h_{b-j+1}(-t) h_{a+j}(t)`.
pub fn hook_schur_bilinear(a: u32, b: u32, nvars: usize) -> ExactPoly {
    let mut acc = ExactPoly::zero(nvars);
    for j in 1..=(b as i64 + 1) {
        let left = complete_homogeneous(b as i64 - j + 1, nvars).negate_vars();
        let right = complete_homogeneous(a as i64 + j, nvars);
        acc = acc.add(&left.mul(&right));
    }
    if b % 2 == 1 {
        acc = acc.neg();
    }
    acc
}

/// Applies the differential operator obtained from `op` by the substitution
/// `t_k -> (1/k) d/dt_k` to `f` and evaluates at `t = 0`.
///
/// For a monomial `t^m` of `op` this picks out
/// `prod_k (m_k! / k^{m_k}) * [t^m] f`.
pub fn apply_diff_exact(op: &ExactPoly, f: &ExactPoly) -> BigRational {
    let mut acc = BigRational::zero();
    for (m, c) in op.terms() {
        let fc = f.coeff(m);
        if fc.is_zero() {
            continue;
        }
        acc += c * &fc * diff_weight_factor(m, op.nvars());
    }
    acc
}

/// Same pairing against a numeric series.
pub fn apply_diff_series(op: &ExactPoly, f: &TauSeries) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, c) in op.terms() {
        if m.weight() > f.weight_bound() {
            return Err(Error::Truncation(format!(
                "operator monomial of weight {} exceeds series bound {}",
                m.weight(),
                f.weight_bound()
            )));
        }
        let fc = f.coeff(m)?;
        if fc.norm_sqr() == 0.0 {
            continue;
        }
        let factor = rational_to_f64(&(c * diff_weight_factor(m, op.nvars())));
        acc += fc * factor;
    }
    Ok(acc)
}

fn diff_weight_factor(m: &Mono, nvars: usize) -> BigRational {
    // prod_k m_k! / k^{m_k}
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for k in 1..=nvars {
        let e = m.exponent(k);
        for f in 1..=e as i64 {
            num *= BigInt::from(f);
        }
        for _ in 0..e {
            den *= BigInt::from(k as i64);
        }
    }
    BigRational::new(num, den)
}

/// Schur differential pairing `s_lambda(d_t) f |_{t=0}` in exact arithmetic.
pub fn schur_pairing_exact(lambda: &Partition, f: &ExactPoly) -> BigRational {
    let s = schur_jacobi_trudi(lambda, f.nvars());
    apply_diff_exact(&s, f)
}

/// Schur differential pairing against a numeric tau series.
pub fn schur_pairing(lambda: &Partition, f: &TauSeries) -> Result<Complex64> {
    if lambda.weight() > f.weight_bound() {
        return Err(Error::Truncation(format!(
            "partition weight {} exceeds series bound {}",
            lambda.weight(),
            f.weight_bound()
        )));
    }
    let s = schur_jacobi_trudi(lambda, f.weight_bound() as usize);
    apply_diff_series(&s, f)
}

// ---------------------------------------------------------------------------
// Bialternant oracle
// ---------------------------------------------------------------------------

/// Sparse integer polynomial in `N <= 8` auxiliary variables, exponents
/// packed 8 bits each.  Only used by the bialternant oracle, where every
/// intermediate coefficient is an integer.
#[derive(Debug, Clone, Default)]
struct XPoly {
    // sorted by key
    terms: Vec<(u64, i64)>,
}

fn xkey(exps: &[u32]) -> u64 {
    let mut k = 0u64;
    for (i, &e) in exps.iter().enumerate() {
        debug_assert!(e < 256);
        k |= (e as u64) << (8 * i);
    }
    k
}

fn xkey_get(key: u64, i: usize) -> u32 {
    ((key >> (8 * i)) & 0xff) as u32
}

impl XPoly {
    fn from_terms(mut terms: Vec<(u64, i64)>) -> XPoly {
        terms.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(u64, i64)> = Vec::with_capacity(terms.len());
        for (k, c) in terms {
            if let Some(last) = out.last_mut() {
                if last.0 == k {
                    last.1 += c;
                    if last.1 == 0 {
                        out.pop();
                    }
                    continue;
                }
            }
            if c != 0 {
                out.push((k, c));
            }
        }
        XPoly { terms: out }
    }

    fn mul(&self, other: &XPoly) -> XPoly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(ka, ca) in &self.terms {
            for &(kb, cb) in &other.terms {
                terms.push((ka + kb, ca.checked_mul(cb).expect("xpoly overflow")));
            }
        }
        XPoly::from_terms(terms)
    }
}

/// Alternant `det(x_a^{e_b})` expanded over permutations: one monomial per
/// permutation since the exponents `e_b` are pairwise distinct.
fn alternant(exps: &[u32]) -> XPoly {
    let n = exps.len();
    let mut terms = Vec::new();
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(
        n: usize,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        exps: &[u32],
        terms: &mut Vec<(u64, i64)>,
    ) {
        if perm.len() == n {
            let mut inversions = 0usize;
            for a in 0..n {
                for b in (a + 1)..n {
                    if perm[a] > perm[b] {
                        inversions += 1;
                    }
                }
            }
            let e: Vec<u32> = perm.iter().map(|&b| exps[b]).collect();
            terms.push((xkey(&e), if inversions % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for cand in 0..n {
            if !used[cand] {
                used[cand] = true;
                perm.push(cand);
                rec(n, perm, used, exps, terms);
                perm.pop();
                used[cand] = false;
            }
        }
    }
    rec(n, &mut perm, &mut used, exps, &mut terms);
    XPoly::from_terms(terms)
}

/// Exact division of `f` by `(x_i - x_j)`, valid when `f` vanishes on
/// `x_i = x_j`.  Treats `f` as a polynomial in `x_i` and runs a Horner
/// scheme from the top degree down.
fn divide_by_difference(f: &XPoly, i: usize, j: usize) -> XPoly {
    let maxdeg = f.terms.iter().map(|&(k, _)| xkey_get(k, i)).max().unwrap_or(0);
    // c[d] = terms of x_i-degree d, with the x_i exponent cleared
    let mut level: Vec<Vec<(u64, i64)>> = vec![Vec::new(); maxdeg as usize + 1];
    for &(k, c) in &f.terms {
        let d = xkey_get(k, i) as usize;
        level[d].push((k - ((d as u64) << (8 * i)), c));
    }
    // q_{d-1} = c_d + shift_j(q_d), descending
    let mut out_terms: Vec<(u64, i64)> = Vec::new();
    let mut acc: Vec<(u64, i64)> = Vec::new(); // current q_d, x_i exponent cleared
    for d in (1..=maxdeg as usize).rev() {
        let mut next: Vec<(u64, i64)> = level[d].clone();
        // + x_j * acc
        next.extend(acc.iter().map(|&(k, c)| (k + (1u64 << (8 * j)), c)));
        let merged = XPoly::from_terms(next);
        acc = merged.terms.clone();
        // emit q at x_i-degree d-1
        out_terms.extend(acc.iter().map(|&(k, c)| (k + (((d - 1) as u64) << (8 * i)), c)));
    }
    // Remainder check: c_0 + x_j * q_0 must vanish.
    let mut rem: Vec<(u64, i64)> = level[0].clone();
    rem.extend(acc.iter().map(|&(k, c)| (k + (1u64 << (8 * j)), c)));
    debug_assert!(XPoly::from_terms(rem).terms.is_empty(), "inexact division");
    XPoly::from_terms(out_terms)
}

/// Power sum `p_k = sum_a x_a^k` in `n` variables.
fn power_sum(k: u32, n: usize) -> XPoly {
    let terms = (0..n)
        .map(|a| {
            let mut e = vec![0u32; n];
            e[a] = k;
            (xkey(&e), 1i64)
        })
        .collect();
    XPoly::from_terms(terms)
}

/// Independent brute-force Schur function: the ratio of alternants in `n`
/// auxiliary variables, re-expressed through `t_i = (1/i) sum_a x_a^i` by
/// solving for the power-sum expansion.
///
/// Requires `n >= length(lambda)`; the result is exact for monomials of
/// weight up to `min(n, |lambda|)`.
pub fn schur_bialternant_oracle(lambda: &Partition, n: usize) -> Result<ExactPoly> {
    if n < lambda.len() {
        return Err(Error::validation(format!(
            "bialternant oracle needs N >= length(lambda): {} < {}",
            n,
            lambda.len()
        )));
    }
    assert!(n <= 8, "oracle supports at most 8 auxiliary variables");
    let w = lambda.weight();
    let nvars_t = (w as usize).max(1);
    if w == 0 {
        return Ok(ExactPoly::one(nvars_t));
    }

    // s_lambda(x) = a_{lambda + delta} / a_delta, via exact division by the
    // Vandermonde factors.
    let exps: Vec<u32> = (0..n).map(|b| lambda.part(b) + (n - 1 - b) as u32).collect();
    let mut s = alternant(&exps);
    for i in 0..n {
        for j in (i + 1)..n {
            s = divide_by_difference(&s, i, j);
        }
    }
    // a_delta's own sign: dividing det(x^{delta}) by prod_{i<j}(x_i - x_j)
    // must yield 1; normalize so the oracle is exactly the ratio.
    let delta: Vec<u32> = (0..n).map(|b| (n - 1 - b) as u32).collect();
    let mut v = alternant(&delta);
    for i in 0..n {
        for j in (i + 1)..n {
            v = divide_by_difference(&v, i, j);
        }
    }
    assert_eq!(v.terms.len(), 1);
    let vsign = v.terms[0].1;
    assert!(vsign == 1 || vsign == -1);
    if vsign == -1 {
        for t in &mut s.terms {
            t.1 = -t.1;
        }
    }

    // Solve s = sum_{mu |- w} c_mu p_mu over the rationals, where the
    // linear system is indexed by the dominance-representative monomials
    // x^{mu} (mu sorted descending, padded with zeros).
    let mus = crate::partitions::partitions_of_weight(w);
    let mus: Vec<&Partition> = mus.iter().filter(|mu| mu.len() <= n).collect();
    let dim = mus.len();
    let keys: Vec<u64> = mus
        .iter()
        .map(|mu| {
            let mut e = vec![0u32; n];
            for (i, &p) in mu.parts().iter().enumerate() {
                e[i] = p;
            }
            xkey(&e)
        })
        .collect();

    let pmu: Vec<XPoly> = mus
        .iter()
        .map(|mu| {
            let mut acc = power_sum(mu.part(0), n);
            for &p in &mu.parts()[1..] {
                acc = acc.mul(&power_sum(p, n));
            }
            acc
        })
        .collect();

    let lookup = |p: &XPoly, key: u64| -> i64 {
        match p.terms.binary_search_by_key(&key, |t| t.0) {
            Ok(idx) => p.terms[idx].1,
            Err(_) => 0,
        }
    };

    // mat[r][c] = coefficient of monomial keys[r] in p_{mu_c}
    let mut mat: Vec<Vec<BigRational>> = (0..dim)
        .map(|r| (0..dim).map(|c| ratio(lookup(&pmu[c], keys[r]), 1)).collect())
        .collect();
    let mut rhs: Vec<BigRational> = (0..dim).map(|r| ratio(lookup(&s, keys[r]), 1)).collect();

    // Exact Gaussian elimination.
    for col in 0..dim {
        let piv = (col..dim)
            .find(|&r| !mat[r][col].is_zero())
            .ok_or_else(|| Error::SingularMatrix("bialternant power-sum system"))?;
        mat.swap(col, piv);
        rhs.swap(col, piv);
        let inv = mat[col][col].clone();
        for r in 0..dim {
            if r == col || mat[r][col].is_zero() {
                continue;
            }
            let f = &mat[r][col] / &inv;
            for c2 in col..dim {
                let sub = &f * &mat[col][c2];
                mat[r][c2] = &mat[r][c2] - sub;
            }
            let sub = &f * &rhs[col];
            rhs[r] = &rhs[r] - sub;
        }
    }
    for r in 0..dim {
        rhs[r] = &rhs[r] / &mat[r][r];
    }

    // Re-express: p_k = k t_k, so p_mu = prod_i (mu_i t_{mu_i}).
    let mut out = ExactPoly::zero(nvars_t);
    for (c, mu) in rhs.iter().zip(mus.iter()) {
        if c.is_zero() {
            continue;
        }
        let mut term = ExactPoly::constant(nvars_t, c.clone());
        for &p in mu.parts() {
            term = term.mul(&ExactPoly::var(nvars_t, p as usize).scale(&ratio(p as i64, 1)));
        }
        out = out.add(&term);
    }
    Ok(out)
}
