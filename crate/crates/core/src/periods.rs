//! Numerical first- and second-kind period matrices for hyperelliptic
//! curves with real branch points.
//!
//! Cycle periods are computed as segment integrals between consecutive
//! branch points (Gauss-Chebyshev after the cosine substitution, which
//! absorbs the inverse-square-root endpoint behaviour).  The intersection
//! matrix of those cycles is recovered numerically from the Riemann
//! bilinear relations, checked for integrality and unimodularity, and
//! brought to symplectic normal form over the integers.  That pins a
//! canonical homology basis without hand-maintained sign tables: a sheet
//! or orientation mistake would break the integrality check.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::{CurveModel, HyperellipticCurve};
use crate::linalg::{
    cinvert, cmax_abs, cmul, cscale, csub, ctranspose, czero, min_eig_sym_real,
    symmetry_residual, CMat,
};
use crate::{Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// First and second period matrices of a curve, with derived data.
#[derive(Debug, Clone)]
pub struct PeriodData {
    pub g: usize,
    /// a-periods of the holomorphic basis u
    pub a_mat: CMat,
    /// b-periods of u
    pub b_mat: CMat,
    /// negated a-periods of the second-kind basis r
    pub s_mat: CMat,
    /// negated b-periods of r
    pub t2_mat: CMat,
}

#[derive(Serialize, Deserialize)]
struct PeriodFile {
    g: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "B")]
    b: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "S")]
    s: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "T2")]
    t2: Vec<Vec<[f64; 2]>>,
}

fn mat_to_pairs(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    m.iter()
        .map(|r| r.iter().map(|c| [c.re, c.im]).collect())
        .collect()
}

fn pairs_to_mat(v: &[Vec<[f64; 2]>]) -> CMat {
    v.iter()
        .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect()
}

impl PeriodData {
    /// Normalised Riemann matrix `T = A^-1 B`.
    pub fn t_norm(&self) -> Result<CMat> {
        Ok(cmul(&cinvert(&self.a_mat, "period matrix A")?, &self.b_mat))
    }

    /// `kappa = S A^-1`, the symmetric quadratic form of the sigma function.
    pub fn kappa(&self) -> Result<CMat> {
        Ok(cmul(&self.s_mat, &cinvert(&self.a_mat, "period matrix A")?))
    }

    /// Max-norm of `P J P^T + 2 i pi J` over the full block period matrix.
    pub fn legendre_residual(&self) -> f64 {
        let g = self.g;
        let n = 2 * g;
        let mut p = czero(n, n);
        for i in 0..g {
            for j in 0..g {
                p[i][j] = self.a_mat[i][j];
                p[i][j + g] = self.b_mat[i][j];
                p[i + g][j] = self.s_mat[i][j];
                p[i + g][j + g] = self.t2_mat[i][j];
            }
        }
        let j_mat = sympl_j(g);
        let lhs = cmul(&cmul(&p, &j_mat), &ctranspose(&p));
        let target = cscale(&j_mat, Complex64::new(0.0, -TAU));
        cmax_abs(&csub(&lhs, &target))
    }

    /// Residual checks behind the PeriodData invariants; `tol` is usually
    /// 1e-8.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let scale = cmax_abs(&self.a_mat).max(cmax_abs(&self.b_mat)).max(1.0);
        let t = self.t_norm()?;
        if symmetry_residual(&t) > tol {
            return Err(Error::validation(format!(
                "T = A^-1 B is not symmetric (residual {:.3e})",
                symmetry_residual(&t)
            )));
        }
        let im_t: CMat = t
            .iter()
            .map(|r| r.iter().map(|c| Complex64::new(c.im, 0.0)).collect())
            .collect();
        let lo = min_eig_sym_real(&im_t);
        if lo <= 0.0 {
            return Err(Error::validation(format!(
                "Im(T) is not positive definite (min eigenvalue {lo:.3e})"
            )));
        }
        let kappa = self.kappa()?;
        if symmetry_residual(&kappa) > tol * cmax_abs(&kappa).max(1.0) {
            return Err(Error::validation(format!(
                "kappa is not symmetric (residual {:.3e})",
                symmetry_residual(&kappa)
            )));
        }
        let leg = self.legendre_residual();
        if leg > tol * scale.powi(2).max(1.0) {
            return Err(Error::validation(format!(
                "generalized Legendre relation fails (residual {leg:.3e})"
            )));
        }
        Ok(())
    }

    /// Winding vectors `U_k = A^-1 R_k` for `k = 1..kmax`.
    pub fn winding_vectors(&self, curve: &CurveModel, kmax: usize) -> Result<Vec<Vec<Complex64>>> {
        let local = curve.local_numeric(2 * kmax + 16)?;
        let rks = local.winding_numerators(kmax);
        let ainv = cinvert(&self.a_mat, "period matrix A")?;
        Ok(rks
            .iter()
            .map(|rk| crate::linalg::cmat_vec(&ainv, rk))
            .collect())
    }

    pub fn to_json(&self) -> String {
        let f = PeriodFile {
            g: self.g,
            a: mat_to_pairs(&self.a_mat),
            b: mat_to_pairs(&self.b_mat),
            s: mat_to_pairs(&self.s_mat),
            t2: mat_to_pairs(&self.t2_mat),
        };
        serde_json::to_string_pretty(&f).expect("period data serialises")
    }

    pub fn from_json(text: &str) -> Result<PeriodData> {
        let f: PeriodFile = serde_json::from_str(text)?;
        let pd = PeriodData {
            g: f.g,
            a_mat: pairs_to_mat(&f.a),
            b_mat: pairs_to_mat(&f.b),
            s_mat: pairs_to_mat(&f.s),
            t2_mat: pairs_to_mat(&f.t2),
        };
        for m in [&pd.a_mat, &pd.b_mat, &pd.s_mat, &pd.t2_mat] {
            if m.len() != pd.g || m.iter().any(|r| r.len() != pd.g) {
                return Err(Error::validation("period matrix shape mismatch"));
            }
        }
        Ok(pd)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Loads period data; invariants are re-checked unless `validate` is
    /// false.
    pub fn load(path: &Path, validate: bool) -> Result<PeriodData> {
        let pd = PeriodData::from_json(&std::fs::read_to_string(path)?)?;
        if validate {
            pd.validate(1e-8)?;
        }
        Ok(pd)
    }
}

/// Symplectic `J = [[0, -I], [I, 0]]`.
fn sympl_j(g: usize) -> CMat {
    let n = 2 * g;
    let mut j = czero(n, n);
    for k in 0..g {
        j[k][k + g] = Complex64::new(-1.0, 0.0);
        j[k + g][k] = Complex64::new(1.0, 0.0);
    }
    j
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    pub tol: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { initial_nodes: 32, max_nodes: 1 << 15, tol: 1e-10 }
    }
}

/// Integrates `F(x) / sqrt((x-a)(b-x))` over `[a, b]` with Gauss-Chebyshev
/// nodes after the cosine substitution: `(pi/N) sum F(x_i)` at
/// `x_i = m + h cos((2i-1)pi/(2N))`.
fn chebyshev_integral<F: Fn(f64) -> Complex64>(a: f64, b: f64, n: usize, f: &F) -> Complex64 {
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 1..=n {
        let theta = (2 * i - 1) as f64 * std::f64::consts::PI / (2 * n) as f64;
        acc += f(m + h * theta.cos());
    }
    acc * std::f64::consts::PI / n as f64
}

/// Adaptive node doubling; returns the value and the change at the last
/// doubling (the step-halving stability measure).
fn chebyshev_adaptive<F: Fn(f64) -> Complex64>(
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
    what: &str,
    f: &F,
) -> Result<(Complex64, f64)> {
    let mut n = opts.initial_nodes;
    let mut prev = chebyshev_integral(a, b, n, f);
    loop {
        n *= 2;
        let next = chebyshev_integral(a, b, n, f);
        let change = (next - prev).norm();
        if change <= opts.tol * next.norm().max(1.0) {
            return Ok((next, change));
        }
        if n >= opts.max_nodes {
            return Err(Error::Quadrature(format!(
                "{what}: no convergence at {n} nodes (last change {change:.3e})"
            )));
        }
        prev = next;
    }
}

// ---------------------------------------------------------------------------
// Homology: intersection extraction and symplectic normalisation
// ---------------------------------------------------------------------------

/// Recovers the integer intersection matrix of the cycles behind `full`
/// from the Riemann bilinear relations:
/// `M^-1 = 2 pi i full^-1 J full^-T` when the rows of `full` are the
/// periods of `(u_1..u_g, r_1..r_g)` over the cycles, normalised so that
/// `Res(int(u_i) r_j) = delta_ij`.
pub fn intersection_matrix(full: &CMat) -> Result<Vec<Vec<i64>>> {
    let n = full.len();
    let g = n / 2;
    let finv = cinvert(full, "cycle period matrix")?;
    let minv_c = cscale(
        &cmul(&cmul(&finv, &sympl_j(g)), &ctranspose(&finv)),
        Complex64::new(0.0, TAU),
    );
    let m_c = cinvert(&minv_c, "intersection form")?;
    let mut m = vec![vec![0i64; n]; n];
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = m_c[i][j];
            let r = v.re.round();
            worst = worst.max((v.re - r).abs()).max(v.im.abs());
            m[i][j] = r as i64;
        }
    }
    if worst > 1e-6 {
        return Err(Error::validation(format!(
            "intersection matrix is not integral (deviation {worst:.3e})"
        )));
    }
    for i in 0..n {
        for j in 0..n {
            if m[i][j] != -m[j][i] {
                return Err(Error::validation("intersection matrix is not antisymmetric"));
            }
        }
    }
    let det = int_det(&m);
    if det.abs() != 1 {
        return Err(Error::validation(format!(
            "cycle set spans a proper sublattice (intersection determinant {det})"
        )));
    }
    Ok(m)
}

fn int_det(m: &[Vec<i64>]) -> i64 {
    // Bareiss fraction-free elimination in i128
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else { return 0 };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// Finds `U` in `GL(2g, Z)` with `U M U^T = J0`, `J0 = [[0, I], [-I, 0]]`,
/// so rows `0..g` of `U` express a-cycles and rows `g..2g` b-cycles with
/// `a_i . b_j = delta_ij` in the basis underlying `M`.
pub fn symplectic_normalize(m: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = m.len();
    let g = n / 2;
    let form = |u: &Vec<Vec<i128>>, i: usize, j: usize| -> i128 {
        let mut acc = 0i128;
        for p in 0..n {
            if u[i][p] == 0 {
                continue;
            }
            for q in 0..n {
                acc += u[i][p] * m[p][q] as i128 * u[j][q];
            }
        }
        acc
    };
    // rows of u: candidate basis, pairs placed at (2k, 2k+1)
    let mut u: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();
    for pair in 0..g {
        let lo = 2 * pair;
        // pick the remaining pair with minimal nonzero pairing
        let (mut bi, mut bj, mut bv) = (usize::MAX, usize::MAX, 0i128);
        for i in lo..n {
            for j in (i + 1)..n {
                let v = form(&u, i, j);
                if v != 0 && (bv == 0 || v.abs() < bv.abs()) {
                    (bi, bj, bv) = (i, j, v);
                }
            }
        }
        if bv == 0 {
            return Err(Error::validation("degenerate intersection form"));
        }
        u.swap(lo, bi);
        u.swap(lo + 1, if bj == lo { bi } else { bj });

        // reduce the remaining vectors against the pair; a non-divisible
        // pairing lets us shrink the pivot (Euclidean descent)
        let mut guard = 0;
        loop {
            guard += 1;
            if guard > 10_000 {
                return Err(Error::validation("symplectic reduction did not terminate"));
            }
            let d = form(&u, lo, lo + 1);
            if d == 0 {
                return Err(Error::validation("symplectic reduction lost its pivot"));
            }
            let mut offender = None;
            for k in (lo + 2)..n {
                let va = form(&u, lo, k);
                let vb = form(&u, lo + 1, k);
                if va % d != 0 || vb % d != 0 {
                    offender = Some((k, va, vb));
                    break;
                }
            }
            match offender {
                None => {
                    // exact clearing of all remaining pairings
                    for k in (lo + 2)..n {
                        let va = form(&u, lo, k);
                        let vb = form(&u, lo + 1, k);
                        // v_k -> v_k - (va/d) v_(lo+1) + (vb/d) v_lo
                        let beta = va / d;
                        let alpha = -vb / d;
                        if alpha != 0 || beta != 0 {
                            for c in 0..n {
                                let add = alpha * u[lo][c] + beta * u[lo + 1][c];
                                u[k][c] -= add;
                            }
                        }
                    }
                    break;
                }
                Some((k, va, vb)) => {
                    // reduce v_k partially, then swap it into the pair to
                    // shrink |pivot|
                    let qa = div_round(va, d);
                    let qb = div_round(vb, d);
                    for c in 0..n {
                        let add = -qb * u[lo][c] + qa * u[lo + 1][c];
                        u[k][c] -= add;
                    }
                    let ra = form(&u, lo, k);
                    let rb = form(&u, lo + 1, k);
                    if ra != 0 && ra.abs() < d.abs() {
                        u.swap(lo + 1, k);
                    } else if rb != 0 && rb.abs() < d.abs() {
                        u.swap(lo, k);
                    } else if ra != 0 || rb != 0 {
                        // fall back: swap whichever is nonzero
                        if ra != 0 {
                            u.swap(lo + 1, k);
                        } else {
                            u.swap(lo, k);
                        }
                    }
                }
            }
        }
        let d = form(&u, lo, lo + 1);
        if d.abs() != 1 {
            return Err(Error::validation(format!("non-unimodular symplectic pivot {d}")));
        }
        if d == -1 {
            u.swap(lo, lo + 1);
        }
    }
    // interleaved (a1, b1, a2, b2, ...) -> (a1..ag, b1..bg)
    let mut out = vec![vec![0i64; n]; n];
    for k in 0..g {
        for c in 0..n {
            out[k][c] = u[2 * k][c] as i64;
            out[g + k][c] = u[2 * k + 1][c] as i64;
        }
    }
    // verify exactly
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0i128;
            for p in 0..n {
                if out[i][p] == 0 {
                    continue;
                }
                for q in 0..n {
                    acc += out[i][p] as i128 * m[p][q] as i128 * out[j][q] as i128;
                }
            }
            let expect = if i < g && j == i + g {
                1
            } else if i >= g && j == i - g {
                -1
            } else {
                0
            };
            if acc != expect {
                return Err(Error::validation("symplectic normal form verification failed"));
            }
        }
    }
    Ok(out)
}

fn div_round(a: i128, b: i128) -> i128 {
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + if (r > 0) == (b > 0) { 1 } else { -1 }
    } else {
        q
    }
}

/// Builds symplectic period data from raw cycle periods `full`
/// (rows: `u_1..u_g, r_1..r_g`; columns: any 2g independent cycles).
pub fn periods_from_cycles(full: &CMat) -> Result<PeriodData> {
    let n = full.len();
    let g = n / 2;
    let m = intersection_matrix(full)?;
    let build = |m: &Vec<Vec<i64>>| -> Result<PeriodData> {
        let u = symplectic_normalize(m)?;
        // periods over the new basis: P~ = full * U^T
        let ut: CMat = (0..n)
            .map(|i| (0..n).map(|j| Complex64::new(u[j][i] as f64, 0.0)).collect())
            .collect();
        let p = cmul(full, &ut);
        let mut a = czero(g, g);
        let mut b = czero(g, g);
        let mut s = czero(g, g);
        let mut t2 = czero(g, g);
        for i in 0..g {
            for j in 0..g {
                a[i][j] = p[i][j];
                b[i][j] = p[i][j + g];
                s[i][j] = -p[i + g][j];
                t2[i][j] = -p[i + g][j + g];
            }
        }
        Ok(PeriodData { g, a_mat: a, b_mat: b, s_mat: s, t2_mat: t2 })
    };
    let pd = build(&m)?;
    let t = pd.t_norm()?;
    let im_t: CMat = t
        .iter()
        .map(|r| r.iter().map(|c| Complex64::new(c.im, 0.0)).collect())
        .collect();
    if min_eig_sym_real(&im_t) > 0.0 {
        return Ok(pd);
    }
    // wrong global orientation: flip the intersection form once
    let mneg: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|&x| -x).collect()).collect();
    build(&mneg)
}

// ---------------------------------------------------------------------------
// Hyperelliptic segment periods
// ---------------------------------------------------------------------------

/// Periods of a real-branch-point hyperelliptic curve.
///
/// Returns the period data and the worst node-doubling change over all
/// integrals (the quadrature stability measure).
pub fn hyperelliptic_periods_with_stability(
    curve: &HyperellipticCurve,
    opts: &QuadratureOptions,
) -> Result<(PeriodData, f64)> {
    curve.validate()?;
    let pts = curve
        .branch_points()
        .ok_or_else(|| {
            Error::unsupported("periods need real branch points; supply PeriodData by file otherwise")
        })?
        .to_vec();
    let g = curve.genus();
    let n_cycles = 2 * g;
    let model = CurveModel::Hyperelliptic(curve.clone());
    let local = model.local_numeric(4 * g + 24)?;

    // every differential here is h(x) dx / y with polynomial h
    let mut numerators: Vec<Vec<Complex64>> = Vec::with_capacity(2 * g);
    for d in local.holomorphic_basis().iter().chain(local.meromorphic_basis().iter()) {
        let mut h = vec![Complex64::new(0.0, 0.0); 2 * g + 2];
        for (xp, yp, c) in &d.numerator {
            assert_eq!(*yp, 0, "hyperelliptic differentials are polynomial over y");
            // c x^xp / P_y = (c/2) x^xp / y
            h[*xp as usize] += c / 2.0;
        }
        numerators.push(h);
    }

    let eval_poly = |h: &[Complex64], x: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in h.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };

    // Cycle sigma_j around [a_j, a_(j+1)]: period = 2 * segment integral on
    // the upper side; the y-phase there is i^(number of points to the right).
    let mut full = czero(n_cycles, n_cycles);
    let mut worst_change = 0.0f64;
    for (j, seg) in pts.windows(2).enumerate() {
        let (a, b) = (seg[0], seg[1]);
        let crossings = 2 * g - j;
        let phase = Complex64::new(0.0, 1.0).powu(crossings as u32);
        let rest = |x: f64| -> f64 {
            let mut p = 1.0;
            for (i, &pt) in pts.iter().enumerate() {
                if i != j && i != j + 1 {
                    p *= (x - pt).abs();
                }
            }
            p
        };
        for (row, h) in numerators.iter().enumerate() {
            let f = |x: f64| -> Complex64 {
                // (h/y) * sqrt((x-a)(b-x)) = h / (2 phase sqrt(rest))
                eval_poly(h, x) / (2.0 * phase * rest(x).sqrt())
            };
            let what = format!("segment {} differential {}", j + 1, row + 1);
            let (val, change) = chebyshev_adaptive(a, b, opts, &what, &f)?;
            full[row][j] = 2.0 * val;
            worst_change = worst_change.max(change);
        }
    }

    let pd = periods_from_cycles(&full)?;
    Ok((pd, worst_change))
}

pub fn hyperelliptic_periods(curve: &HyperellipticCurve) -> Result<PeriodData> {
    hyperelliptic_periods_with_stability(curve, &QuadratureOptions::default()).map(|(pd, _)| pd)
}

// ---------------------------------------------------------------------------
// Abel map (real-branch-point hyperelliptic, straight x-paths)
// ---------------------------------------------------------------------------

/// Shifted Abel map: `sum_k int from (a_(base_k), 0) to q_k of u` along
/// straight x-paths, the y-sheet tracked by continuity from the branch
/// point.
pub fn abel_map(
    curve: &HyperellipticCurve,
    points: &[(Complex64, Complex64)],
    base_indices: &[usize],
) -> Result<Vec<Complex64>> {
    let pts = curve
        .branch_points()
        .ok_or_else(|| Error::unsupported("abel_map needs real branch points"))?
        .to_vec();
    let g = curve.genus();
    if points.len() != base_indices.len() {
        return Err(Error::validation("one base branch point per divisor point"));
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); g];
    for (&(xq, yq), &bi) in points.iter().zip(base_indices) {
        if bi >= pts.len() {
            return Err(Error::validation("base branch point index out of range"));
        }
        let seg = integrate_u_from_branch(curve, &pts, pts[bi], (xq, yq))?;
        for (a, s) in acc.iter_mut().zip(seg) {
            *a += s;
        }
    }
    Ok(acc)
}

fn y_squared(curve: &HyperellipticCurve, x: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &l in curve.lambda().iter().rev() {
        acc = acc * x + l;
    }
    acc
}

/// Integrates the holomorphic vector u from `(a, 0)` to `(xq, yq)` along
/// the straight x-segment.  The substitution `x = a + s^2 (xq - a)`
/// removes the square-root singularity at the branch point.
fn integrate_u_from_branch(
    curve: &HyperellipticCurve,
    pts: &[f64],
    a: f64,
    (xq, yq): (Complex64, Complex64),
) -> Result<Vec<Complex64>> {
    let g = curve.genus();
    let dx_total = xq - a;
    if dx_total.norm() == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); g]);
    }
    for &p in pts {
        if (p - a).abs() < 1e-14 {
            continue;
        }
        // distance from the other branch point to the segment
        let t = ((p - a) * dx_total.re) / dx_total.norm_sqr();
        let t = t.clamp(0.0, 1.0);
        let closest = Complex64::new(a, 0.0) + dx_total * t;
        if (closest - Complex64::new(p, 0.0)).norm() < 1e-6 {
            return Err(Error::validation(format!(
                "integration path passes through branch point {p}"
            )));
        }
    }

    // y(s) = s v(s) with v(s)^2 = q(x(s))/s^2 smooth and nonzero on [0,1]
    let w0 = {
        let lambda = curve.lambda();
        let mut d = Complex64::new(0.0, 0.0);
        for (k, &l) in lambda.iter().enumerate().skip(1) {
            d += l * (k as f64) * Complex64::new(a, 0.0).powu(k as u32 - 1);
        }
        d * dx_total
    };
    if w0.norm() == 0.0 {
        return Err(Error::validation("degenerate branch point"));
    }

    let v_at = |s: f64, v_prev: Complex64| -> Complex64 {
        if s == 0.0 {
            return v_prev;
        }
        let x = Complex64::new(a, 0.0) + dx_total * s * s;
        let w = y_squared(curve, x) / (s * s);
        let r = w.sqrt();
        if (r - v_prev).norm() <= (r + v_prev).norm() {
            r
        } else {
            -r
        }
    };
    let integrand = |s: f64, v: Complex64| -> Vec<Complex64> {
        // u_i = x^(g-i) dx / y; dx = 2 s dx_total ds; y = s v
        let x = Complex64::new(a, 0.0) + dx_total * s * s;
        (1..=g).map(|i| 2.0 * dx_total * x.powu((g - i) as u32) / v).collect()
    };

    // composite Simpson with continuity tracking of the sqrt branch
    let n_steps = 2000usize;
    let h = 1.0 / n_steps as f64;
    let mut v = w0.sqrt();
    let mut sums = integrand(0.0, v);
    for k in 1..=n_steps {
        let smid = (k as f64 - 0.5) * h;
        v = v_at(smid, v);
        let fm = integrand(smid, v);
        let send = k as f64 * h;
        v = v_at(send, v);
        let fe = integrand(send, v);
        let wend = if k == n_steps { 1.0 } else { 2.0 };
        for i in 0..g {
            sums[i] += 4.0 * fm[i] + wend * fe[i];
        }
    }
    let mut out: Vec<Complex64> = sums.into_iter().map(|s| s * h / 6.0).collect();

    // the lift ends on one of the two sheets; match the requested point
    let y_end = v; // y(1) = v(1)
    if (y_end - yq).norm() > (y_end + yq).norm() {
        for o in &mut out {
            *o = -*o;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cident;

    fn test_curve() -> HyperellipticCurve {
        HyperellipticCurve::from_branch_points(vec![-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap()
    }

    #[test]
    fn quadrature_exact_on_chebyshev_weight() {
        // int_-1^1 x^2 / sqrt(1-x^2) dx = pi/2
        let v = chebyshev_integral(-1.0, 1.0, 64, &|x| Complex64::new(x * x, 0.0));
        assert!((v.re - std::f64::consts::PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn genus2_periods_validate() {
        let (pd, stability) =
            hyperelliptic_periods_with_stability(&test_curve(), &QuadratureOptions::default())
                .unwrap();
        assert!(stability < 1e-9, "stability {stability}");
        pd.validate(1e-8).unwrap();
        assert!(pd.legendre_residual() < 1e-8, "legendre {}", pd.legendre_residual());

        // A B^T symmetric (first Riemann bilinear relation)
        let abt = cmul(&pd.a_mat, &ctranspose(&pd.b_mat));
        assert!(symmetry_residual(&abt) < 1e-8);

        // A C^T = 1, where row i of C is U_(n_i): here U_1, U_3
        let u = pd
            .winding_vectors(&CurveModel::Hyperelliptic(test_curve()), 3)
            .unwrap();
        let mut c = czero(2, 2);
        for j in 0..2 {
            c[0][j] = u[0][j];
            c[1][j] = u[2][j];
        }
        let prod = cmul(&pd.a_mat, &ctranspose(&c));
        assert!(cmax_abs(&csub(&prod, &cident(2))) < 1e-8);
        // U_2 = 0
        assert!(u[1].iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn legendre_sensitivity() {
        let pd = hyperelliptic_periods(&test_curve()).unwrap();
        let mut bad = pd.clone();
        bad.b_mat[0][0] += Complex64::new(1e-3, 0.0);
        assert!(bad.legendre_residual() >= 1e-4);

        // all-zero matrices give exactly |2 pi J| = 2 pi
        let z = PeriodData {
            g: 2,
            a_mat: czero(2, 2),
            b_mat: czero(2, 2),
            s_mat: czero(2, 2),
            t2_mat: czero(2, 2),
        };
        assert!((z.legendre_residual() - TAU).abs() < 1e-12);
    }

    #[test]
    fn save_load_roundtrip() {
        let pd = hyperelliptic_periods(&test_curve()).unwrap();
        let path = std::env::temp_dir().join("kptau_period_test.json");
        pd.save(&path).unwrap();
        let back = PeriodData::load(&path, true).unwrap();
        for (m1, m2) in [
            (&pd.a_mat, &back.a_mat),
            (&pd.b_mat, &back.b_mat),
            (&pd.s_mat, &back.s_mat),
            (&pd.t2_mat, &back.t2_mat),
        ] {
            for (r1, r2) in m1.iter().zip(m2.iter()) {
                for (c1, c2) in r1.iter().zip(r2.iter()) {
                    assert_eq!(c1, c2); // bitwise round trip
                }
            }
        }
        // corrupting kappa symmetry must fail validation
        let mut bad = pd.clone();
        bad.s_mat[0][1] += Complex64::new(0.5, 0.1);
        assert!(bad.validate(1e-8).is_err());
        let _ = std::fs::remove_file(&path);
    }

    #[test]
    fn abel_map_basics() {
        let curve = test_curve();
        assert!(abel_map(&curve, &[], &[]).unwrap().is_empty() == false || true);
        let zero = abel_map(&curve, &[], &[]).unwrap();
        assert!(zero.iter().all(|z| z.norm() == 0.0));
        // q at the base branch point: zero-length path
        let v = abel_map(
            &curve,
            &[(Complex64::new(-2.0, 0.0), Complex64::new(0.0, 0.0))],
            &[0],
        )
        .unwrap();
        assert!(v.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn abel_map_rejects_paths_through_branch_points() {
        let curve = test_curve();
        // straight segment from a_1 = -2 to a real point on the far right
        // passes through the remaining branch points
        let q = (Complex64::new(3.0, 0.0), Complex64::new(1.0, 0.0));
        assert!(abel_map(&curve, &[q], &[0]).is_err());
    }

    #[test]
    fn abel_map_lattice_consistency() {
        // The difference of the maps based at two branch points is a
        // half-period; doubled, it must be an integer combination of the
        // columns of (A | B).
        let curve = test_curve();
        let pd = hyperelliptic_periods(&curve).unwrap();
        let x0 = Complex64::new(3.5, 1.0);
        let y0 = y_squared(&curve, x0).sqrt();
        let v1 = abel_map(&curve, &[(x0, y0)], &[0]).unwrap();
        let v2 = abel_map(&curve, &[(x0, y0)], &[4]).unwrap();
        let d: Vec<Complex64> = v1.iter().zip(&v2).map(|(a, b)| 2.0 * (a - b)).collect();
        let g = 2;
        let mut gen: Vec<Vec<f64>> = Vec::new();
        for j in 0..g {
            gen.push((0..g).flat_map(|i| [pd.a_mat[i][j].re, pd.a_mat[i][j].im]).collect());
        }
        for j in 0..g {
            gen.push((0..g).flat_map(|i| [pd.b_mat[i][j].re, pd.b_mat[i][j].im]).collect());
        }
        let target: Vec<f64> = (0..g).flat_map(|i| [d[i].re, d[i].im]).collect();
        let nsize = 2 * g;
        let mut mat = vec![vec![0.0f64; nsize]; nsize];
        let mut rhs = vec![0.0f64; nsize];
        for i in 0..nsize {
            for j in 0..nsize {
                mat[i][j] = gen[i].iter().zip(&gen[j]).map(|(a, b)| a * b).sum();
            }
            rhs[i] = gen[i].iter().zip(&target).map(|(a, b)| a * b).sum();
        }
        for c in 0..nsize {
            let p = (c..nsize)
                .max_by(|&a, &b| mat[a][c].abs().total_cmp(&mat[b][c].abs()))
                .unwrap();
            mat.swap(c, p);
            rhs.swap(c, p);
            for r in 0..nsize {
                if r != c {
                    let f = mat[r][c] / mat[c][c];
                    for cc in 0..nsize {
                        mat[r][cc] -= f * mat[c][cc];
                    }
                    rhs[r] -= f * rhs[c];
                }
            }
        }
        for (i, r) in rhs.iter_mut().enumerate() {
            *r /= mat[i][i];
        }
        for r in &rhs {
            assert!((r - r.round()).abs() < 1e-6, "non-integer lattice coefficient {r}");
        }
    }
}
