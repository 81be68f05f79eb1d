//! Tau-function assembly for algebraic curves, in the theta and sigma
//! gauges, and the extraction of Plucker and affine (big-cell)
//! coordinates by two independent routes.
//!
//! The series route pairs Schur differential operators against the
//! truncated tau series; the Baker route divides the Laurent expansions of
//! the dressed basis elements.  Giambelli determinants over the affine
//! window tie the two to the Plucker relations.

use num_complex::Complex64;

use crate::curve::CurveModel;
use crate::linalg::{cinvert, cmat_vec, CMat};
use crate::mono::{monomials_up_to_weight, Mono};
use crate::partitions::{frobenius_of, partitions_up_to_weight, Partition};
use crate::periods::PeriodData;
use crate::schur::{apply_diff_series, complete_homogeneous, schur_pairing, ExactPoly};
use crate::series::TauSeries;
use crate::thetasigma::{ThetaContext, ThetaSum};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    Sigma,
    Theta,
}

/// Everything needed to evaluate one tau function: curve, periods, the
/// sigma-gauge argument `v`, and the truncation weight (which is also the
/// number of flow variables).
pub struct TauModel {
    pub curve: CurveModel,
    pub pd: PeriodData,
    pub v: Vec<Complex64>,
    pub w: u32,
    pub gauge: Gauge,
    // cached geometry
    kappa: CMat,
    /// winding numerators R_k, k = 1..=kmax
    r_vecs: Vec<Vec<Complex64>>,
    /// winding vectors U_k = A^-1 R_k
    u_vecs: Vec<Vec<Complex64>>,
    /// Taylor table mu^alg_ij, i + j <= 2 w
    mu_alg: Vec<Vec<Complex64>>,
    theta_sum: ThetaSum,
    theta0: Complex64,
}

impl TauModel {
    pub fn new(
        curve: CurveModel,
        pd: PeriodData,
        v: Vec<Complex64>,
        w: u32,
        gauge: Gauge,
    ) -> Result<TauModel> {
        if v.len() != pd.g {
            return Err(Error::validation(format!(
                "v must have {} complex entries",
                pd.g
            )));
        }
        if w > crate::series::MAX_WEIGHT {
            return Err(Error::validation(format!(
                "truncation weight {w} above engine bound {}",
                crate::series::MAX_WEIGHT
            )));
        }
        let kmax = w as usize + 2;
        let local = curve.local_numeric(4 * (w as usize) + 24)?;
        let mu_alg = local.mu_alg_table(2 * w as usize + 2)?;
        let r_vecs = local.winding_numerators(kmax);
        let ainv = cinvert(&pd.a_mat, "period matrix A")?;
        let u_vecs: Vec<Vec<Complex64>> = r_vecs.iter().map(|r| cmat_vec(&ainv, r)).collect();
        let kappa = pd.kappa()?;
        let e = cmat_vec(&ainv, &v);
        // derivatives up to order w for the theta series, plus margin for
        // the Baker route
        let ctx = ThetaContext::for_periods(&pd, 1e-14, w as usize + 4)?;
        let theta_sum = ThetaSum::new(&ctx, &e);
        let theta0 = theta_sum.value();
        if theta0.norm() < 1e-10 * theta_sum.scale().max(1.0) {
            return Err(Error::DivisorPoint);
        }
        Ok(TauModel {
            curve,
            pd,
            v,
            w,
            gauge,
            kappa,
            r_vecs,
            u_vecs,
            mu_alg,
            theta_sum,
            theta0,
        })
    }

    pub fn nvars(&self) -> usize {
        self.w as usize
    }

    /// `R_k^T kappa R_l` (the transcendental Taylor part `mu^trans_(k-1,l-1)`).
    fn r_kappa_r(&self, k: usize, l: usize) -> Complex64 {
        let rk = &self.r_vecs[k - 1];
        let rl = &self.r_vecs[l - 1];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.pd.g {
            for j in 0..self.pd.g {
                acc += rk[i] * self.kappa[i][j] * rl[j];
            }
        }
        acc
    }

    /// Quadratic form of the theta-gauge exponent:
    /// `Q_(i+1, j+1) = -(mu^alg_ij + R_(i+1)^T kappa R_(j+1))`.
    pub fn q_matrix(&self, upto: usize) -> Vec<Vec<Complex64>> {
        let mut q = vec![vec![Complex64::new(0.0, 0.0); upto + 1]; upto + 1];
        for i in 1..=upto {
            for j in 1..=upto {
                if i + j > 2 * self.w as usize + 2 {
                    continue;
                }
                q[i][j] = -(self.mu_alg[i - 1][j - 1] + self.r_kappa_r(i, j));
            }
        }
        q
    }

    /// `Lambda_k = R_k^T kappa v`, the linear gauge factor between the two
    /// tau forms.
    pub fn lambda_linear(&self) -> Vec<Complex64> {
        let kv = cmat_vec(&self.kappa, &self.v);
        self.r_vecs
            .iter()
            .map(|rk| rk.iter().zip(&kv).map(|(r, k)| r * k).sum())
            .collect()
    }

    /// Series of `theta(e + sum t_k U_k) / theta(e)`.
    fn theta_flow_series(&self) -> TauSeries {
        let m = self.nvars();
        let mut s = TauSeries::zero(m, self.w);
        for grade in monomials_up_to_weight(m, self.w) {
            for mono in grade {
                // directional derivative along U_k, repeated m_k times,
                // divided by prod m_k!
                let mut dirs: Vec<&[Complex64]> = Vec::new();
                let mut fact = 1.0f64;
                let mut vanish = false;
                for k in 1..=m {
                    let e = mono.exponent(k);
                    if e == 0 {
                        continue;
                    }
                    let u = &self.u_vecs[k - 1];
                    if u.iter().all(|z| z.norm() == 0.0) {
                        vanish = true;
                        break;
                    }
                    for f in 1..=e {
                        fact *= f as f64;
                    }
                    for _ in 0..e {
                        dirs.push(u.as_slice());
                    }
                }
                if vanish {
                    continue;
                }
                let val = self.theta_sum.dirderiv(&dirs) / (self.theta0 * fact);
                s.add_to_coeff(mono, val);
            }
        }
        s
    }

    /// Exponential of a quadratic form `1/2 sum_(k,l >= 1) c_(kl) t_k t_l`
    /// plus an optional linear part.
    fn exp_quadratic(
        &self,
        coeff: impl Fn(usize, usize) -> Complex64,
        linear: Option<&[Complex64]>,
    ) -> TauSeries {
        let m = self.nvars();
        let mut expo = TauSeries::zero(m, self.w);
        for k in 1..=m {
            for l in k..=m {
                if (k + l) as u32 > self.w {
                    continue;
                }
                let c = if k == l { coeff(k, l) / 2.0 } else { coeff(k, l) };
                expo.add_to_coeff(Mono::var(k).mul(&Mono::var(l)), c);
            }
        }
        if let Some(lin) = linear {
            for (k, c) in lin.iter().enumerate().take(m) {
                expo.add_to_coeff(Mono::var(k + 1), *c);
            }
        }
        expo.exp()
    }

    /// Tau series in the requested gauge, normalised to constant term 1.
    pub fn build(&self) -> TauSeries {
        match self.gauge {
            Gauge::Theta => self.build_theta(),
            Gauge::Sigma => self.build_sigma(),
        }
    }

    /// `exp(-1/2 sum Q_ij t_i t_j) theta(e + sum t_i U_i) / theta(e)`.
    pub fn build_theta(&self) -> TauSeries {
        let theta_part = self.theta_flow_series();
        let quad = self.exp_quadratic(
            |k, l| self.mu_alg[k - 1][l - 1] + self.r_kappa_r(k, l),
            None,
        );
        theta_part.mul(&quad).expect("shapes agree")
    }

    /// `sigma(sum R_k t_k + v)/sigma(v) exp(1/2 sum mu^alg_(k-1,l-1) t_k t_l)`,
    /// assembled through theta as
    /// `theta_flow * exp(quadratic kappa part + Lambda linear part)`.
    pub fn build_sigma(&self) -> TauSeries {
        // sigma(R t + v)/sigma(v) = theta_flow * exp(1/2 R kappa R t t + Lambda t),
        // and the remaining factor is exp(1/2 mu^alg_(k-1,l-1) t_k t_l)
        let theta_part = self.theta_flow_series();
        let lambda = self.lambda_linear();
        let quad = self.exp_quadratic(
            |k, l| self.mu_alg[k - 1][l - 1] + self.r_kappa_r(k, l),
            Some(&lambda[..self.nvars().min(lambda.len())]),
        );
        theta_part.mul(&quad).expect("shapes agree")
    }

    /// `h_i(nabla_U) theta(e)` and `nabla_(U_j) h_i(nabla_U) theta(e)`
    /// through the cached lattice sum, with
    /// `nabla_U = (nabla_(U_1), 1/2 nabla_(U_2), ...)`.
    ///
    /// The dressed-basis expansions divide these series; the positive tail
    /// sign is the one whose affine matrix satisfies the Plucker
    /// determinant identities (it amounts to reading the base point as
    /// `-e`, which the even theta function cannot distinguish elsewhere).
    fn h_theta(&self, i: usize, extra_dir: Option<usize>) -> Complex64 {
        let m = self.nvars().max(i);
        let h = complete_homogeneous(i as i64, m);
        let mut acc = Complex64::new(0.0, 0.0);
        for (mono, c) in h.terms() {
            let mut dirs: Vec<&[Complex64]> = Vec::new();
            let mut factor = crate::schur::rational_to_f64(c);
            let mut vanish = false;
            for k in 1..=m {
                let e = mono.exponent(k);
                if e == 0 {
                    continue;
                }
                if k > self.u_vecs.len() {
                    vanish = true;
                    break;
                }
                let u = &self.u_vecs[k - 1];
                if u.iter().all(|z| z.norm() == 0.0) {
                    vanish = true;
                    break;
                }
                for _ in 0..e {
                    dirs.push(u.as_slice());
                    factor /= k as f64;
                }
            }
            if vanish {
                continue;
            }
            if let Some(j) = extra_dir {
                dirs.push(self.u_vecs[j - 1].as_slice());
            }
            acc += self.theta_sum.dirderiv(&dirs) * factor;
        }
        acc
    }

    /// Affine coordinates by the geometric Baker route:
    /// `A_ij = Q_(i+1,j)/(i+1) + P_(i+1,j)` for `j >= 1`, `A_i0 = 0`,
    /// where `sum_i P_ij z^-i = (sum_i M_ij z^-i) / (sum_i N_i z^-i)`.
    pub fn baker_affine(&self, k_window: usize) -> Result<AffineMatrix> {
        let depth = k_window + 2;
        let n: Vec<Complex64> = (0..=depth).map(|i| self.h_theta(i, None)).collect();
        if n[0].norm() == 0.0 {
            return Err(Error::DivisorPoint);
        }
        let q = self.q_matrix(depth + 1);
        let mut a = vec![vec![Complex64::new(0.0, 0.0); k_window + 1]; k_window + 1];
        for j in 1..=k_window {
            let mcol: Vec<Complex64> = (0..=depth).map(|i| -self.h_theta(i, Some(j))).collect();
            // triangular division P = M / N
            let mut p = vec![Complex64::new(0.0, 0.0); depth + 1];
            for i in 0..=depth {
                let mut acc = mcol[i];
                for k in 1..=i {
                    acc -= n[k] * p[i - k];
                }
                p[i] = acc / n[0];
            }
            for i in 0..=k_window {
                a[i][j] = q[i + 1][j] / (i as f64 + 1.0) + p[i + 1];
            }
        }
        Ok(AffineMatrix { a })
    }
}

/// Finite window of big-cell affine coordinates, `A_(ab)` with
/// `0 <= a, b <= K`.
#[derive(Debug, Clone)]
pub struct AffineMatrix {
    pub a: Vec<Vec<Complex64>>,
}

impl AffineMatrix {
    pub fn window(&self) -> usize {
        self.a.len() - 1
    }

    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.a[a][b]
    }
}

/// Plucker coordinates keyed by partition, normalised to `pi_empty = 1`.
#[derive(Debug, Clone)]
pub struct PluckerTable {
    pub entries: Vec<(Partition, Complex64)>,
}

impl PluckerTable {
    pub fn get(&self, lambda: &Partition) -> Option<Complex64> {
        self.entries.iter().find(|(p, _)| p == lambda).map(|(_, v)| *v)
    }
}

/// Hook extraction `A_ab = (-1)^b pi_(a|b)` through the bilinear identity
/// `A_ab = sum_(j=0..b) h_(b-j)(-d) h_(a+j+1)(d) tau / tau(0)`.
pub fn affine_from_tau(tau: &TauSeries, k_window: usize) -> Result<AffineMatrix> {
    let needed = 2 * k_window as u32 + 1;
    if tau.weight_bound() < needed {
        return Err(Error::Truncation(format!(
            "affine window {k_window} needs weight {needed}, series has {}",
            tau.weight_bound()
        )));
    }
    let tau0 = tau.constant_term();
    if tau0.norm() == 0.0 {
        return Err(Error::DivisorPoint);
    }
    let m = tau.weight_bound() as usize;
    let mut a = vec![vec![Complex64::new(0.0, 0.0); k_window + 1]; k_window + 1];
    for ai in 0..=k_window {
        for bi in 0..=k_window {
            let mut op = ExactPoly::zero(m);
            for j in 0..=bi as i64 {
                let left = complete_homogeneous(bi as i64 - j, m).negate_vars();
                let right = complete_homogeneous(ai as i64 + j + 1, m);
                op = op.add(&left.mul(&right));
            }
            a[ai][bi] = apply_diff_series(&op, tau)? / tau0;
        }
    }
    Ok(AffineMatrix { a })
}

/// Single affine entry `A_ab` from the tau series; only needs the hook
/// weight `a + b + 1` within the truncation.
pub fn affine_entry(tau: &TauSeries, a: usize, b: usize) -> Result<Complex64> {
    if a as u32 + b as u32 + 1 > tau.weight_bound() {
        return Err(Error::Truncation(format!(
            "hook ({a}|{b}) exceeds series weight bound {}",
            tau.weight_bound()
        )));
    }
    let tau0 = tau.constant_term();
    if tau0.norm() == 0.0 {
        return Err(Error::DivisorPoint);
    }
    let m = tau.weight_bound() as usize;
    let mut op = ExactPoly::zero(m);
    for j in 0..=b as i64 {
        let left = complete_homogeneous(b as i64 - j, m).negate_vars();
        let right = complete_homogeneous(a as i64 + j + 1, m);
        op = op.add(&left.mul(&right));
    }
    Ok(apply_diff_series(&op, tau)? / tau0)
}

/// Giambelli determinant evaluated with exactly the hook entries the
/// partition needs, so partitions of weight up to the truncation bound
/// work even when the full square window would not fit.
pub fn plucker_giambelli_from_tau(tau: &TauSeries, lambda: &Partition) -> Result<Complex64> {
    let fc = frobenius_of(lambda);
    let r = fc.arms.len();
    if r == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mat: CMat = fc
        .arms
        .iter()
        .map(|&a| {
            fc.legs
                .iter()
                .map(|&b| affine_entry(tau, a as usize, b as usize))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let det = crate::linalg::cdet(&mat);
    let sign = if fc.legs.iter().sum::<u32>() % 2 == 0 { 1.0 } else { -1.0 };
    Ok(det * sign)
}

/// `pi_lambda = s_lambda(d_t) tau / tau(0)`.
pub fn plucker_direct(tau: &TauSeries, lambda: &Partition) -> Result<Complex64> {
    let tau0 = tau.constant_term();
    if tau0.norm() == 0.0 {
        return Err(Error::DivisorPoint);
    }
    Ok(schur_pairing(lambda, tau)? / tau0)
}

/// `pi_lambda = (-1)^(sum b_k) det(A_(a_i, b_j))` from the affine window.
pub fn plucker_giambelli(a: &AffineMatrix, lambda: &Partition) -> Result<Complex64> {
    let fc = frobenius_of(lambda);
    let r = fc.arms.len();
    if r == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let k = a.window();
    if fc.arms.iter().chain(&fc.legs).any(|&x| x as usize > k) {
        return Err(Error::validation(format!(
            "affine window {k} too small for partition {lambda}"
        )));
    }
    let mat: CMat = (0..r)
        .map(|i| (0..r).map(|j| a.get(fc.arms[i] as usize, fc.legs[j] as usize)).collect())
        .collect();
    let det = crate::linalg::cdet(&mat);
    let sign = if fc.legs.iter().sum::<u32>() % 2 == 0 { 1.0 } else { -1.0 };
    Ok(det * sign)
}

/// All Plucker coordinates up to `max_weight` via the direct route.
pub fn schur_expansion_table(tau: &TauSeries, max_weight: u32) -> Result<PluckerTable> {
    let mut entries = Vec::new();
    for lambda in partitions_up_to_weight(max_weight) {
        let v = plucker_direct(tau, &lambda)?;
        entries.push((lambda, v));
    }
    Ok(PluckerTable { entries })
}

/// Coefficientwise residual of the reconstruction
/// `sum_lambda pi_lambda s_lambda(t)` against the tau series itself.
pub fn reconstruction_residual(tau: &TauSeries, table: &PluckerTable) -> Result<f64> {
    let m = tau.nvars();
    let w = tau.weight_bound();
    let mut recon = TauSeries::zero(m, w);
    for (lambda, pi) in &table.entries {
        if lambda.weight() > w {
            continue;
        }
        let s = crate::schur::schur_jacobi_trudi(lambda, m);
        for (mono, c) in s.terms() {
            recon.add_to_coeff(*mono, pi * crate::schur::rational_to_f64(c));
        }
    }
    let tau0 = tau.constant_term();
    let scale = tau.max_abs().max(1e-300);
    Ok(recon.scale(tau0).max_diff(tau)? / scale)
}

/// Multiplies a tau series by `exp(sum c_k t_k)`; a pure gauge factor.
pub fn gauge_multiply(tau: &TauSeries, c: &[Complex64]) -> TauSeries {
    let m = tau.nvars();
    let mut lin = TauSeries::zero(m, tau.weight_bound());
    for (k, ck) in c.iter().enumerate().take(m) {
        lin.add_to_coeff(Mono::var(k + 1), *ck);
    }
    tau.mul(&lin.exp()).expect("shapes agree")
}

/// Gauge coefficients aligning a tau series with the Baker-route frame,
/// whose affine matrix has a vanishing zeroth column.
///
/// `exp(sum c_k t_k) tau` annihilates the hook column `pi_(a|0)` for all
/// `a` exactly when it equals 1 on the principal ray `t_k = z^k / k`, so
/// `c_k = -k [z^k] log tau([z])`.  This is the constructive reading of the
/// linear gauge factor relating the two printed tau forms.
pub fn lambda_gauge(tau: &TauSeries) -> Vec<Complex64> {
    let w = tau.weight_bound() as usize;
    // p[d] = coefficient of z^d in tau(t_k = z^k / k)
    let mut p = vec![Complex64::new(0.0, 0.0); w + 1];
    for (mono, c) in tau.iter() {
        let mut f = 1.0f64;
        for k in 1..=tau.nvars() {
            for _ in 0..mono.exponent(k) {
                f /= k as f64;
            }
        }
        p[mono.weight() as usize] += c * f;
    }
    // log of the polynomial, normalised by the constant term
    let p0 = p[0];
    let mut u = vec![Complex64::new(0.0, 0.0); w + 1];
    for d in 1..=w {
        u[d] = p[d] / p0;
    }
    let mut logp = vec![Complex64::new(0.0, 0.0); w + 1];
    let mut pow = u.clone();
    let mut sign = 1.0f64;
    for n in 1..=w {
        for d in 0..=w {
            logp[d] += pow[d] * sign / n as f64;
        }
        if n < w {
            let mut next = vec![Complex64::new(0.0, 0.0); w + 1];
            for i in 0..=w {
                for j in 0..=(w - i) {
                    next[i + j] += pow[i] * u[j];
                }
            }
            pow = next;
        }
        sign = -sign;
    }
    (1..=w).map(|k| -logp[k] * k as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::HyperellipticCurve;
    use crate::periods::hyperelliptic_periods;
    use crate::thetasigma::wp_values_default;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model(gauge: Gauge, w: u32) -> TauModel {
        let curve = HyperellipticCurve::from_branch_points(vec![-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
        let pd = hyperelliptic_periods(&curve).unwrap();
        let v = vec![c(0.31, 0.12), c(-0.42, 0.2)];
        TauModel::new(CurveModel::Hyperelliptic(curve), pd, v, w, gauge).unwrap()
    }

    #[test]
    fn tau_constant_term_and_t1() {
        let m = model(Gauge::Sigma, 6);
        let tau = m.build();
        assert!((tau.constant_term() - c(1.0, 0.0)).norm() < 1e-12);

        // coefficient of t_1 is zeta_1(v)
        let kp = wp_values_default(&m.v, &m.pd, 2).unwrap();
        let t1 = tau.coeff(&Mono::var(1)).unwrap();
        assert!((t1 - kp.zeta[0]).norm() < 1e-8 * kp.zeta[0].norm().max(1.0));

        // coefficient of t_1^2 = (zeta_1^2 - wp_11 + mu^alg_00) / 2
        let mu00 = m.mu_alg[0][0];
        let expect = (kp.zeta[0] * kp.zeta[0] - kp.wp2(0, 0) + mu00) / 2.0;
        let t11 = tau.coeff(&Mono::from_exponents(&[2])).unwrap();
        assert!((t11 - expect).norm() < 1e-8 * expect.norm().max(1.0));
    }

    #[test]
    fn gauge_relation_between_builds() {
        let m = model(Gauge::Sigma, 6);
        let tau_sigma = m.build_sigma();
        let tau_theta = m.build_theta();
        let lambda = m.lambda_linear();
        let aligned = gauge_multiply(&tau_theta, &lambda[..m.nvars()]);
        let resid = tau_sigma.max_diff(&aligned).unwrap();
        assert!(resid < 1e-8 * tau_sigma.max_abs(), "gauge residual {resid}");
    }

    #[test]
    fn gauge_multiply_invariants() {
        let m = model(Gauge::Sigma, 6);
        let tau = m.build();
        // c = 0 is the identity
        let same = gauge_multiply(&tau, &[c(0.0, 0.0); 6]);
        assert!(tau.max_diff(&same).unwrap() < 1e-15);
        // second log-derivative in t_1 at 0 is gauge invariant
        let cs = [c(0.3, -0.2), c(0.1, 0.05), c(0.0, 0.0), c(0.2, 0.0), c(0.0, 0.1), c(0.0, 0.0)];
        let gt = gauge_multiply(&tau, &cs);
        let d2logtau = |f: &TauSeries| {
            let f0 = f.constant_term();
            let f1 = f.coeff(&Mono::var(1)).unwrap();
            let f2 = f.coeff(&Mono::from_exponents(&[2])).unwrap();
            2.0 * f2 / f0 - (f1 / f0) * (f1 / f0)
        };
        assert!((d2logtau(&tau) - d2logtau(&gt)).norm() < 1e-10);
        // pi_empty unchanged
        assert!((gt.constant_term() - tau.constant_term()).norm() < 1e-12);
    }

    #[test]
    fn plucker_direct_basics() {
        let m = model(Gauge::Sigma, 6);
        let tau = m.build();
        let empty = plucker_direct(&tau, &Partition::empty()).unwrap();
        assert!((empty - c(1.0, 0.0)).norm() < 1e-12);
        let p1 = plucker_direct(&tau, &Partition::new(vec![1])).unwrap();
        assert!((p1 - tau.coeff(&Mono::var(1)).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn giambelli_matches_direct() {
        let m = model(Gauge::Sigma, 7);
        let tau = m.build();
        let a = affine_from_tau(&tau, 3).unwrap();
        for lambda in partitions_up_to_weight(6) {
            let fc = frobenius_of(&lambda);
            if fc.arms.iter().chain(&fc.legs).any(|&x| x > 3) {
                continue;
            }
            let direct = plucker_direct(&tau, &lambda).unwrap();
            let giambelli = plucker_giambelli(&a, &lambda).unwrap();
            let scale = direct.norm().max(1e-6);
            assert!(
                (direct - giambelli).norm() < 1e-6 * scale,
                "lambda={lambda}: direct {direct} vs giambelli {giambelli}"
            );
        }
    }

    #[test]
    fn hook_signs_against_list() {
        // A_00 = zeta_1; A_01 = -(paper value), A_10 = +(paper value)
        let m = model(Gauge::Sigma, 6);
        let tau = m.build();
        let a = affine_from_tau(&tau, 2).unwrap();
        let kp = wp_values_default(&m.v, &m.pd, 2).unwrap();
        assert!((a.get(0, 0) - kp.zeta[0]).norm() < 1e-8 * kp.zeta[0].norm().max(1.0));
        // pi_(1|0) = pi_(0|1) here since U_2 = 0, so A_10 = -A_01
        assert!((a.get(1, 0) + a.get(0, 1)).norm() < 1e-8 * a.get(1, 0).norm().max(1.0));
    }

    #[test]
    fn reconstruction_closes() {
        let m = model(Gauge::Sigma, 6);
        let tau = m.build();
        let table = schur_expansion_table(&tau, 6).unwrap();
        let resid = reconstruction_residual(&tau, &table).unwrap();
        assert!(resid < 1e-8, "reconstruction residual {resid}");
    }

    #[test]
    fn baker_route_matches_series_route() {
        let m = model(Gauge::Theta, 9);
        let tau_theta = m.build_theta();
        let k = 3usize;
        let baker = m.baker_affine(k).unwrap();
        // A_i0 = 0 on the Baker side
        for i in 0..=k {
            assert!(baker.get(i, 0).norm() < 1e-12);
        }
        // gauge-align the theta-gauge tau with exp(sum lambda_i t_i)
        let lam = lambda_gauge(&tau_theta);
        let aligned = gauge_multiply(&tau_theta, &lam);
        let a = affine_from_tau(&aligned, k).unwrap();
        for i in 0..=k {
            for j in 0..=k {
                if i + j > 6 || j == 0 {
                    continue;
                }
                let x = baker.get(i, j);
                let y = a.get(i, j);
                assert!(
                    (x - y).norm() < 1e-5 * x.norm().max(1.0),
                    "A[{i}][{j}]: baker {x} vs series {y}"
                );
            }
        }
    }
}
