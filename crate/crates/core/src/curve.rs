//! Planar curve models with a Weierstrass point at infinity: gap sequences,
//! local expansions, holomorphic and second-kind differential bases, the
//! algebraic 2-polar, the `mu^alg` expansion table and winding numerators.
//!
//! Two families are supported: hyperelliptic curves
//! `y^2 = 4 x^(2g+1) + alpha_2g x^2g + ... + alpha_0` and cyclic trigonal
//! genus-3 curves `y^3 = x^4 + beta_3 x^3 + beta_6 x^2 + beta_9 x + beta_12`.
//! The local parameter at infinity is fixed so that `x = xi^-n` exactly.
//!
//! Everything is generic over the coefficient ring: numeric mode works over
//! complex doubles, symbolic mode over exact polynomials in the curve
//! coefficients, so tables like `mu^alg` come out as exact identities.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::scalar::{Scalar, ToComplex};
use crate::sympoly::SymPoly;
use crate::xiseries::{BiTriangle, XiSeries};
use crate::{Error, Result};

/// Weierstrass gap sequence `(n_1, ..., n_g)` at the point at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapSequence {
    gaps: Vec<u32>,
}

impl GapSequence {
    pub fn gaps(&self) -> &[u32] {
        &self.gaps
    }

    pub fn genus(&self) -> usize {
        self.gaps.len()
    }
}

/// Gap sequence of the numerical semigroup generated by `n` and `s`:
/// the positive integers not of the form `a n + b s`, `a, b >= 0`.
pub fn gap_sequence(n: u32, s: u32) -> Result<GapSequence> {
    if n < 2 || s < 2 {
        return Err(Error::validation("gap_sequence needs n, s >= 2"));
    }
    if gcd(n, s) != 1 {
        return Err(Error::validation(format!("gcd({n}, {s}) != 1")));
    }
    let genus = ((n - 1) * (s - 1) / 2) as usize;
    let bound = 2 * genus as u32;
    let mut representable = vec![false; bound as usize + 1];
    representable[0] = true;
    for v in 1..=bound {
        let mut ok = false;
        if v >= n && representable[(v - n) as usize] {
            ok = true;
        }
        if v >= s && representable[(v - s) as usize] {
            ok = true;
        }
        representable[v as usize] = ok;
    }
    let gaps: Vec<u32> = (1..=bound).filter(|&v| !representable[v as usize]).collect();
    debug_assert_eq!(gaps.len(), genus);
    Ok(GapSequence { gaps })
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Complex number serialised as a bare real or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CNum(pub Complex64);

impl Serialize for CNum {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        if self.0.im == 0.0 {
            s.serialize_f64(self.0.re)
        } else {
            [self.0.re, self.0.im].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for CNum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Re(f64),
            Pair([f64; 2]),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Re(re) => CNum(Complex64::new(re, 0.0)),
            Raw::Pair([re, im]) => CNum(Complex64::new(re, im)),
        })
    }
}

/// Hyperelliptic curve `y^2 = 4 x^(2g+1) + alpha_2g x^2g + ... + alpha_0`.
#[derive(Debug, Clone)]
pub struct HyperellipticCurve {
    genus: usize,
    alpha: Vec<Complex64>,
    branch_points: Option<Vec<f64>>,
}

impl HyperellipticCurve {
    pub fn from_alpha(genus: usize, alpha: Vec<Complex64>) -> Result<HyperellipticCurve> {
        if genus < 1 {
            return Err(Error::validation("genus must be >= 1"));
        }
        if alpha.len() != 2 * genus + 1 {
            return Err(Error::validation(format!(
                "expected {} alpha coefficients for genus {genus}, got {}",
                2 * genus + 1,
                alpha.len()
            )));
        }
        Ok(HyperellipticCurve { genus, alpha, branch_points: None })
    }

    /// Curve `y^2 = 4 prod (x - a_j)` from `2g+1` distinct real branch
    /// points; the expansion fixes `alpha`.
    pub fn from_branch_points(mut pts: Vec<f64>) -> Result<HyperellipticCurve> {
        if pts.len() < 3 || pts.len() % 2 == 0 {
            return Err(Error::validation("need an odd number (>= 3) of branch points"));
        }
        pts.sort_by(f64::total_cmp);
        for w in pts.windows(2) {
            if w[0] == w[1] {
                return Err(Error::validation("branch points must be distinct"));
            }
        }
        let genus = (pts.len() - 1) / 2;
        // expand 4 * prod (x - a_j); poly[k] = coefficient of x^k
        let mut poly = vec![4.0f64];
        for &a in &pts {
            let mut next = vec![0.0; poly.len() + 1];
            for (k, &c) in poly.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= a * c;
            }
            poly = next;
        }
        let alpha = poly[..pts.len()]
            .iter()
            .map(|&c| Complex64::new(c, 0.0))
            .collect();
        let mut curve = HyperellipticCurve::from_alpha(genus, alpha)?;
        curve.branch_points = Some(pts);
        Ok(curve)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn branch_points(&self) -> Option<&[f64]> {
        self.branch_points.as_deref()
    }

    /// `lambda_k` coefficients of `y^2 = sum lambda_k x^k`:
    /// `lambda_k = alpha_k` for `k <= 2g` and `lambda_(2g+1) = 4`.
    pub fn lambda(&self) -> Vec<Complex64> {
        let mut l = self.alpha.clone();
        l.push(Complex64::new(4.0, 0.0));
        l
    }

    /// Checks that stored branch points reproduce `alpha`.
    pub fn validate(&self) -> Result<()> {
        if let Some(pts) = &self.branch_points {
            let re = HyperellipticCurve::from_branch_points(pts.clone())?;
            let scale = self
                .alpha
                .iter()
                .map(|c| c.norm())
                .fold(1.0, f64::max);
            for (a, b) in self.alpha.iter().zip(&re.alpha) {
                if (a - b).norm() > 1e-10 * scale {
                    return Err(Error::validation(
                        "branch points do not reproduce the alpha coefficients",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Kleinian 2-polar `F(x, z) = sum_m x^m z^m (2 lambda_2m + (x+z) lambda_(2m+1))`.
    pub fn f_polar(&self, x: Complex64, z: Complex64) -> Complex64 {
        let lambda = self.lambda();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut xz = Complex64::new(1.0, 0.0);
        for m in 0..=self.genus {
            let even = lambda[2 * m];
            let odd = lambda.get(2 * m + 1).copied().unwrap_or_default();
            acc += xz * (2.0 * even + (x + z) * odd);
            xz *= x * z;
        }
        acc
    }
}

/// Cyclic trigonal genus-3 curve `y^3 = x^4 + b3 x^3 + b6 x^2 + b9 x + b12`.
#[derive(Debug, Clone)]
pub struct CyclicTrigonalCurve {
    beta: [Complex64; 4],
}

impl CyclicTrigonalCurve {
    pub fn new(beta: [Complex64; 4]) -> CyclicTrigonalCurve {
        CyclicTrigonalCurve { beta }
    }

    /// `(beta_3, beta_6, beta_9, beta_12)`.
    pub fn beta(&self) -> &[Complex64; 4] {
        &self.beta
    }

    /// Quartic coefficients `q_0..q_4` of `y^3 = sum q_k x^k`.
    pub fn quartic(&self) -> [Complex64; 5] {
        let [b3, b6, b9, b12] = self.beta;
        [b12, b9, b6, b3, Complex64::new(1.0, 0.0)]
    }

    /// The polynomial `T(x, z)` entering the trigonal 2-polar.
    pub fn t_polar(&self, x: Complex64, z: Complex64) -> Complex64 {
        let [b3, b6, b9, b12] = self.beta;
        3.0 * b12
            + (z + 2.0 * x) * b9
            + x * (x + 2.0 * z) * b6
            + 3.0 * b3 * x * x * z
            + x * x * z * z
            + 2.0 * x * x * x * z
    }
}

/// Curve model as read from a curve file.
#[derive(Debug, Clone)]
pub enum CurveModel {
    Hyperelliptic(HyperellipticCurve),
    CyclicTrigonal(CyclicTrigonalCurve),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum CurveFile {
    Hyperelliptic {
        #[serde(skip_serializing_if = "Option::is_none")]
        genus: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        alpha: Option<Vec<CNum>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        branch_points: Option<Vec<f64>>,
    },
    CyclicTrigonal {
        beta: Vec<CNum>,
    },
}

impl CurveModel {
    pub fn genus(&self) -> usize {
        match self {
            CurveModel::Hyperelliptic(c) => c.genus(),
            CurveModel::CyclicTrigonal(_) => 3,
        }
    }

    /// `(n, s)`: pole orders of `x` and `y` at infinity.
    pub fn orders(&self) -> (u32, u32) {
        match self {
            CurveModel::Hyperelliptic(c) => (2, 2 * c.genus() as u32 + 1),
            CurveModel::CyclicTrigonal(_) => (3, 4),
        }
    }

    pub fn gap_sequence(&self) -> GapSequence {
        let (n, s) = self.orders();
        gap_sequence(n, s).expect("curve orders are coprime")
    }

    /// Kleinian 2-polar value at two points of the curve (the full
    /// numerator polynomial of the algebraic bi-differential).
    pub fn two_polar(&self, p: (Complex64, Complex64), q: (Complex64, Complex64)) -> Complex64 {
        let (x, y) = p;
        let (z, w) = q;
        match self {
            CurveModel::Hyperelliptic(c) => c.f_polar(x, z) + 2.0 * y * w,
            CurveModel::CyclicTrigonal(c) => {
                3.0 * w * w * y * y + w * c.t_polar(x, z) + y * c.t_polar(z, x)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<CurveModel> {
        let raw: CurveFile = serde_json::from_str(text)?;
        match raw {
            CurveFile::Hyperelliptic { genus, alpha, branch_points } => match (alpha, branch_points) {
                (Some(alpha), None) => {
                    let g = genus.ok_or_else(|| Error::validation("missing genus"))?;
                    Ok(CurveModel::Hyperelliptic(HyperellipticCurve::from_alpha(
                        g,
                        alpha.into_iter().map(|c| c.0).collect(),
                    )?))
                }
                (None, Some(pts)) => Ok(CurveModel::Hyperelliptic(
                    HyperellipticCurve::from_branch_points(pts)?,
                )),
                (Some(alpha), Some(pts)) => {
                    let g = genus.unwrap_or((pts.len() - 1) / 2);
                    let mut c = HyperellipticCurve::from_alpha(
                        g,
                        alpha.into_iter().map(|c| c.0).collect(),
                    )?;
                    c.branch_points = Some(pts);
                    c.validate()?;
                    Ok(CurveModel::Hyperelliptic(c))
                }
                (None, None) => Err(Error::validation("hyperelliptic curve needs alpha or branch_points")),
            },
            CurveFile::CyclicTrigonal { beta } => {
                if beta.len() != 4 {
                    return Err(Error::validation("expected beta = [b3, b6, b9, b12]"));
                }
                Ok(CurveModel::CyclicTrigonal(CyclicTrigonalCurve::new([
                    beta[0].0, beta[1].0, beta[2].0, beta[3].0,
                ])))
            }
        }
    }

    pub fn to_json(&self) -> String {
        let raw = match self {
            CurveModel::Hyperelliptic(c) => CurveFile::Hyperelliptic {
                genus: Some(c.genus()),
                alpha: Some(c.alpha().iter().map(|&a| CNum(a)).collect()),
                branch_points: c.branch_points().map(|p| p.to_vec()),
            },
            CurveModel::CyclicTrigonal(c) => CurveFile::CyclicTrigonal {
                beta: c.beta().iter().map(|&b| CNum(b)).collect(),
            },
        };
        serde_json::to_string_pretty(&raw).expect("curve serialises")
    }

    pub fn load(path: &std::path::Path) -> Result<CurveModel> {
        CurveModel::from_json(&std::fs::read_to_string(path)?)
    }

    /// Numeric local model at infinity carried to `order` coefficients.
    pub fn local_numeric(&self, order: usize) -> Result<CurveLocal<Complex64>> {
        let proto = Complex64::new(0.0, 0.0);
        match self {
            CurveModel::Hyperelliptic(c) => {
                CurveLocal::hyperelliptic(proto, c.genus(), &c.lambda(), order)
            }
            CurveModel::CyclicTrigonal(c) => {
                let q: Vec<Complex64> = c.quartic().to_vec();
                CurveLocal::trigonal(proto, &q, order)
            }
        }
    }

    /// Symbolic local model with the curve coefficients as indeterminates.
    pub fn local_symbolic(&self, order: usize) -> Result<CurveLocal<SymPoly>> {
        match self {
            CurveModel::Hyperelliptic(c) => {
                let g = c.genus();
                let names: Vec<String> = (0..=2 * g).map(|k| format!("a{k}")).collect();
                let names_ref: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
                let proto = SymPoly::zero(&names_ref);
                let mut lambda: Vec<SymPoly> =
                    (0..=2 * g).map(|k| SymPoly::var(&names_ref, k)).collect();
                lambda.push(SymPoly::from_int(&names_ref, 4));
                CurveLocal::hyperelliptic(proto, g, &lambda, order)
            }
            CurveModel::CyclicTrigonal(_) => {
                let names = ["b3", "b6", "b9", "b12"];
                let proto = SymPoly::zero(&names);
                let q = vec![
                    SymPoly::var(&names, 3),
                    SymPoly::var(&names, 2),
                    SymPoly::var(&names, 1),
                    SymPoly::var(&names, 0),
                    SymPoly::from_int(&names, 1),
                ];
                CurveLocal::trigonal(proto, &q, order)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Hyperelliptic,
    Trigonal,
}

/// A differential `numerator(x, y) dx / P_y` together with its local
/// expansion `omega / dxi`.
#[derive(Debug, Clone)]
pub struct Differential<S> {
    /// monomials `(x_power, y_power, coefficient)` of the numerator
    pub numerator: Vec<(u32, u32, S)>,
    /// local expansion of `omega / dxi` at infinity
    pub series: XiSeries<S>,
}

/// Local model of a curve at its Weierstrass point at infinity.
pub struct CurveLocal<S: Scalar> {
    pub kind: CurveKind,
    pub genus: usize,
    /// pole order of x
    pub n: u32,
    /// pole order of y
    pub s_pole: u32,
    pub gaps: Vec<u32>,
    pub proto: S,
    /// hyperelliptic: `lambda_0..lambda_(2g+1)`; trigonal: quartic `q_0..q_4`
    pub coeffs: Vec<S>,
    pub x: XiSeries<S>,
    pub y: XiSeries<S>,
    pub x_prime: XiSeries<S>,
    /// `P_y(x(xi), y(xi))`
    pub p_y: XiSeries<S>,
}

impl<S: Scalar + ToComplex> CurveLocal<S> {
    fn hyperelliptic(proto: S, genus: usize, lambda: &[S], order: usize) -> Result<CurveLocal<S>> {
        assert_eq!(lambda.len(), 2 * genus + 2);
        let n = 2u32;
        let s_pole = 2 * genus as u32 + 1;
        let len = order;
        let x = XiSeries::monomial(&proto, proto.one(), -(n as i32), len);
        // y^2 = sum lambda_k xi^(-2k) = 4 xi^(-2s) * f,  f unit
        let mut f = XiSeries::zero(&proto, len);
        for (k, lam) in lambda.iter().enumerate() {
            let e = 2 * (s_pole as usize - k);
            if e < len {
                f.c[e] = f.c[e].add(&lam.mul(&proto.from_ratio(1, 4)));
            }
        }
        f.lead = 0;
        let mut y = f.root_unit(2);
        y.lead -= s_pole as i32;
        y = y.scale(&proto.from_ratio(2, 1));
        let x_prime = x.derivative();
        let p_y = y.scale(&proto.from_ratio(2, 1));
        let gaps = gap_sequence(n, s_pole)?.gaps;
        Ok(CurveLocal {
            kind: CurveKind::Hyperelliptic,
            genus,
            n,
            s_pole,
            gaps,
            proto,
            coeffs: lambda.to_vec(),
            x,
            y,
            x_prime,
            p_y,
        })
    }

    fn trigonal(proto: S, q: &[S], order: usize) -> Result<CurveLocal<S>> {
        assert_eq!(q.len(), 5);
        let n = 3u32;
        let s_pole = 4u32;
        let len = order;
        let x = XiSeries::monomial(&proto, proto.one(), -(n as i32), len);
        // y^3 = sum q_k xi^(-3k) = xi^(-12) * f
        let mut f = XiSeries::zero(&proto, len);
        for (k, qk) in q.iter().enumerate() {
            let e = 3 * (4 - k);
            if e < len {
                f.c[e] = f.c[e].add(qk);
            }
        }
        f.lead = 0;
        let mut y = f.root_unit(3);
        y.lead -= s_pole as i32;
        let x_prime = x.derivative();
        let p_y = y.mul(&y).scale(&proto.from_ratio(3, 1));
        let gaps = gap_sequence(n, s_pole)?.gaps;
        Ok(CurveLocal {
            kind: CurveKind::Trigonal,
            genus: 3,
            n,
            s_pole,
            gaps,
            proto,
            coeffs: q.to_vec(),
            x,
            y,
            x_prime,
            p_y,
        })
    }

    /// Local expansion of `x^a y^b dx / P_y`, divided by `dxi`.
    pub fn monomial_differential(&self, a: u32, b: u32) -> XiSeries<S> {
        let mut s = self.x_prime.mul(&self.p_y.invert());
        for _ in 0..a {
            s = s.mul(&self.x);
        }
        for _ in 0..b {
            s = s.mul(&self.y);
        }
        s
    }

    fn differential(&self, numerator: Vec<(u32, u32, S)>) -> Differential<S> {
        let mut acc: Option<XiSeries<S>> = None;
        for (a, b, c) in &numerator {
            let term = self.monomial_differential(*a, *b).scale(c);
            acc = Some(match acc {
                Some(s) => s.add(&term),
                None => term,
            });
        }
        Differential { numerator, series: acc.expect("nonempty numerator") }
    }

    /// Holomorphic basis `u_1..u_g`, ordered so that `u_k` vanishes to
    /// order `n_k - 1` at infinity with unit leading coefficient (the
    /// classical monomial bases; leading term `-(xi^(n_k - 1) + ...) dxi`).
    pub fn holomorphic_basis(&self) -> Vec<Differential<S>> {
        match self.kind {
            CurveKind::Hyperelliptic => {
                let g = self.genus as u32;
                // u_i = x^(g-i) dx / y = 2 x^(g-i) dx / P_y
                (1..=g)
                    .map(|i| self.differential(vec![(g - i, 0, self.proto.from_ratio(2, 1))]))
                    .collect()
            }
            CurveKind::Trigonal => {
                // u_1 = dx/(3y), u_2 = x dx/(3y^2), u_3 = dx/(3y^2)
                vec![
                    self.differential(vec![(0, 1, self.proto.one())]),
                    self.differential(vec![(1, 0, self.proto.one())]),
                    self.differential(vec![(0, 0, self.proto.one())]),
                ]
            }
        }
    }

    /// Second-kind basis `r_1..r_g`: `r_i` has its only pole at infinity,
    /// of order `n_i + 1`, normalised so `r_i = d(xi^(-n_i)) (1 + O(xi))`
    /// and `Res(int(u_i) r_j) = delta_ij`.
    pub fn meromorphic_basis(&self) -> Vec<Differential<S>> {
        match self.kind {
            CurveKind::Hyperelliptic => {
                let g = self.genus;
                let lambda = &self.coeffs;
                (1..=g)
                    .map(|i| {
                        // descending index into the classical list
                        let j = (g + 1 - i) as i64;
                        let mut numer = Vec::new();
                        for k in j..=(2 * g as i64 + 1 - j) {
                            let idx = (k + 1 + j) as usize;
                            if idx >= lambda.len() {
                                continue;
                            }
                            let c = lambda[idx]
                                .mul(&self.proto.from_ratio(k + 1 - j, 2));
                            if !c.is_zero() {
                                numer.push((k as u32, 0u32, c));
                            }
                        }
                        self.differential(numer)
                    })
                    .collect()
            }
            CurveKind::Trigonal => {
                let q = &self.coeffs;
                let b3 = q[3].clone();
                let b6 = q[2].clone();
                let three = self.proto.from_ratio(3, 1);
                vec![
                    // r_1 = x^2 dx/(3y^2)
                    self.differential(vec![(2, 0, self.proto.one())]),
                    // r_2 = 2x dx/(3y)
                    self.differential(vec![(1, 1, self.proto.from_ratio(2, 1))]),
                    // r_3 = (5x^2 + 3 b3 x + b6) dx/(3y)
                    self.differential(vec![
                        (2, 1, self.proto.from_ratio(5, 1)),
                        (1, 1, b3.mul(&three)),
                        (0, 1, b6),
                    ]),
                ]
            }
        }
    }

    /// Winding numerators: `(R_k)_i = -[xi^(k-1)] (u_i / dxi)`, `k = 1..kmax`.
    pub fn winding_numerators(&self, kmax: usize) -> Vec<Vec<S>> {
        let basis = self.holomorphic_basis();
        (1..=kmax)
            .map(|k| {
                basis
                    .iter()
                    .map(|u| {
                        let e = k as i32 - 1;
                        if e < u.series.lead || e >= u.series.order_bound() {
                            self.proto.zero()
                        } else {
                            u.series.coeff(e).neg()
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Separable terms `(xpow_left, ypow_left, xpow_right, ypow_right, coeff)`
    /// of the 2-polar numerator `F(p, q)`.
    fn two_polar_terms(&self) -> Vec<(u32, u32, u32, u32, S)> {
        match self.kind {
            CurveKind::Hyperelliptic => {
                let lambda = &self.coeffs;
                let g = self.genus;
                let mut terms = Vec::new();
                for m in 0..=g as u32 {
                    let even = lambda[2 * m as usize].clone();
                    if !even.is_zero() {
                        terms.push((m, 0, m, 0, even.mul(&self.proto.from_ratio(2, 1))));
                    }
                    if let Some(odd) = lambda.get(2 * m as usize + 1) {
                        if !odd.is_zero() {
                            terms.push((m + 1, 0, m, 0, odd.clone()));
                            terms.push((m, 0, m + 1, 0, odd.clone()));
                        }
                    }
                }
                // + 2 y w
                terms.push((0, 1, 0, 1, self.proto.from_ratio(2, 1)));
                terms
            }
            CurveKind::Trigonal => {
                let q = &self.coeffs;
                let (b3, b6, b9, b12) = (q[3].clone(), q[2].clone(), q[1].clone(), q[0].clone());
                // T(x, z) monomials as (x_pow, z_pow, coeff)
                let tmon: Vec<(u32, u32, S)> = vec![
                    (0, 0, b12.mul(&self.proto.from_ratio(3, 1))),
                    (0, 1, b9.clone()),
                    (1, 0, b9.mul(&self.proto.from_ratio(2, 1))),
                    (2, 0, b6.clone()),
                    (1, 1, b6.mul(&self.proto.from_ratio(2, 1))),
                    (2, 1, b3.mul(&self.proto.from_ratio(3, 1))),
                    (2, 2, self.proto.one()),
                    (3, 1, self.proto.from_ratio(2, 1)),
                ];
                let mut terms = Vec::new();
                // 3 y^2 w^2
                terms.push((0, 2, 0, 2, self.proto.from_ratio(3, 1)));
                for (a, b, c) in &tmon {
                    if c.is_zero() {
                        continue;
                    }
                    // + w T(x, z): left x^a, right z^b w
                    terms.push((*a, 0, *b, 1, c.clone()));
                    // + y T(z, x): left x^b y, right z^a
                    terms.push((*b, 1, *a, 0, c.clone()));
                }
                terms
            }
        }
    }

    /// Taylor coefficients `mu^alg_ij`, `i + j <= max_weight_sum`, of the
    /// regular part of the algebraic bi-differential
    /// `F(p,q) dx dz / ((x-z)^2 P_y P_w) - dxi deta / (xi - eta)^2`.
    ///
    /// The extracted double-pole coefficient must be exactly 1; deviation
    /// beyond 1e-10 reports an error.
    pub fn mu_alg_table(&self, max_weight_sum: usize) -> Result<Vec<Vec<S>>> {
        let n = self.n as usize;
        let tri_mu = max_weight_sum + 1;
        let tri_ktilde = tri_mu + 2;
        let tri_p = tri_ktilde + 2 * (n - 1);
        // Each side series must cover exponents 0..tri_p after the 2n shift.
        let needed = tri_p as i32;

        let mut p = BiTriangle::zero(&self.proto, tri_p);
        for (al, bl, ar, br, c) in self.two_polar_terms() {
            // left: x^al y^bl x' / P_y * xi^(2n), with the coefficient
            let mut left = self.monomial_differential(al, bl).scale(&c);
            left.lead += 2 * n as i32;
            let mut right = self.monomial_differential(ar, br);
            right.lead += 2 * n as i32;
            if left.lead < 0 || right.lead < 0 {
                return Err(Error::validation(
                    "unexpected pole in bi-differential numerator",
                ));
            }
            if left.order_bound() < needed || right.order_bound() < needed {
                return Err(Error::Truncation(
                    "local expansion order too small for mu table".to_string(),
                ));
            }
            p.add_outer(&left, &right);
        }

        // divide twice by G = sum_k xi^k eta^(n-1-k)
        let mut ktilde = p;
        if n >= 2 {
            ktilde = ktilde.div_cyclic_vandermonde(n, &self.proto);
            ktilde = ktilde.div_cyclic_vandermonde(n, &self.proto);
        }

        // double-pole normalisation: constant term of K-tilde is 1
        let dev = ktilde.a[0][0].sub(&self.proto.one());
        if dev.to_complex().norm() > 1e-10 {
            return Err(Error::validation(format!(
                "double-pole coefficient off by {:e}; wrong local parameter or basis",
                dev.to_complex().norm()
            )));
        }
        ktilde.a[0][0] = ktilde.a[0][0].sub(&self.proto.one());

        let r1 = ktilde.div_eta_minus_xi(&self.proto);
        let reg = r1.div_eta_minus_xi(&self.proto);

        let mut table = vec![vec![self.proto.zero(); max_weight_sum + 1]; max_weight_sum + 1];
        for i in 0..=max_weight_sum {
            for j in 0..=(max_weight_sum - i) {
                table[i][j] = reg.get(i, j).clone();
            }
        }
        Ok(table)
    }

    /// Residue pairing `Res(int(u_i) * r_j)` as a validation of the basis
    /// conventions; should be the identity matrix.
    pub fn residue_pairing(&self) -> Vec<Vec<S>> {
        let us = self.holomorphic_basis();
        let rs = self.meromorphic_basis();
        us.iter()
            .map(|u| {
                let iu = u.series.integrate(&self.proto);
                rs.iter().map(|r| iu.mul(&r.series).residue()).collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sym_curve_g2() -> CurveLocal<SymPoly> {
        let curve = CurveModel::Hyperelliptic(
            HyperellipticCurve::from_alpha(2, vec![Complex64::new(0.0, 0.0); 5]).unwrap(),
        );
        curve.local_symbolic(40).unwrap()
    }

    fn sym_curve_trig() -> CurveLocal<SymPoly> {
        let curve = CurveModel::CyclicTrigonal(CyclicTrigonalCurve::new(
            [Complex64::new(0.0, 0.0); 4],
        ));
        curve.local_symbolic(40).unwrap()
    }

    #[test]
    fn gap_sequences() {
        assert_eq!(gap_sequence(2, 5).unwrap().gaps(), &[1, 3]);
        assert_eq!(gap_sequence(3, 4).unwrap().gaps(), &[1, 2, 5]);
        assert_eq!(gap_sequence(2, 3).unwrap().gaps(), &[1]);
        assert!(gap_sequence(2, 4).is_err());
        // hyperelliptic pattern: odd numbers
        for g in 1..=6u32 {
            let gs = gap_sequence(2, 2 * g + 1).unwrap();
            let expect: Vec<u32> = (0..g).map(|k| 2 * k + 1).collect();
            assert_eq!(gs.gaps(), &expect[..]);
        }
    }

    #[test]
    fn branch_point_expansion() {
        let c = HyperellipticCurve::from_branch_points(vec![-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
        // 4 x (x^2-1)(x^2-4) = 4 x^5 - 20 x^3 + 16 x
        let expect = [0.0, 16.0, 0.0, -20.0, 0.0];
        for (a, e) in c.alpha().iter().zip(expect) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-12, "{a} vs {e}");
        }
        c.validate().unwrap();
    }

    #[test]
    fn local_expansion_genus2_symbolic() {
        let loc = sym_curve_g2();
        // x = xi^-2 exactly
        assert_eq!(loc.x.lead, -2);
        assert!(loc.x.c[1..].iter().all(|c| c.is_zero()));
        // y = 2 xi^-5 (1 + (a4/8) xi^2 + ...)
        assert_eq!(loc.y.lead, -5);
        assert_eq!(loc.y.c[0], loc.proto.from_ratio(2, 1));
        assert!(loc.y.c[1].is_zero());
        let a4 = SymPoly::var(&["a0", "a1", "a2", "a3", "a4"], 4);
        assert_eq!(loc.y.c[2], a4.scale(&rat(2, 8)));
    }

    #[test]
    fn local_expansion_trigonal_symbolic() {
        let loc = sym_curve_trig();
        // y = xi^-4 (1 + (b3/3) xi^3 + O(xi^6))
        assert_eq!(loc.y.lead, -4);
        assert_eq!(loc.y.c[0], loc.proto.one());
        assert!(loc.y.c[1].is_zero());
        assert!(loc.y.c[2].is_zero());
        let b3 = SymPoly::var(&["b3", "b6", "b9", "b12"], 0);
        assert_eq!(loc.y.c[3], b3.scale(&rat(1, 3)));
    }

    #[test]
    fn holomorphic_leading_terms() {
        let loc = sym_curve_g2();
        for (k, u) in loc.holomorphic_basis().iter().enumerate() {
            let nk = loc.gaps[k] as i32;
            let mut s = u.series.clone();
            s.normalize();
            assert_eq!(s.lead, nk - 1, "u_{}", k + 1);
            assert_eq!(s.c[0], loc.proto.from_ratio(-1, 1), "u_{}", k + 1);
        }
        let loc = sym_curve_trig();
        for (k, u) in loc.holomorphic_basis().iter().enumerate() {
            let nk = loc.gaps[k] as i32;
            let mut s = u.series.clone();
            s.normalize();
            assert_eq!(s.lead, nk - 1, "trigonal u_{}", k + 1);
            assert_eq!(s.c[0], loc.proto.from_ratio(-1, 1), "trigonal u_{}", k + 1);
        }
    }

    #[test]
    fn meromorphic_leading_and_residues() {
        for loc in [sym_curve_g2()] {
            for (k, r) in loc.meromorphic_basis().iter().enumerate() {
                let nk = loc.gaps[k] as i32;
                let mut s = r.series.clone();
                s.normalize();
                assert_eq!(s.lead, -nk - 1, "r_{}", k + 1);
                assert_eq!(s.c[0], loc.proto.from_ratio(-(nk as i64), 1), "r_{}", k + 1);
                assert!(s.residue().is_zero(), "r_{} residue", k + 1);
            }
        }
        let loc = sym_curve_trig();
        for (k, r) in loc.meromorphic_basis().iter().enumerate() {
            let nk = loc.gaps[k] as i32;
            let mut s = r.series.clone();
            s.normalize();
            assert_eq!(s.lead, -nk - 1, "trig r_{}", k + 1);
            assert_eq!(s.c[0], loc.proto.from_ratio(-(nk as i64), 1), "trig r_{}", k + 1);
            assert!(s.residue().is_zero(), "trig r_{} residue", k + 1);
        }
    }

    #[test]
    fn residue_pairing_is_identity() {
        for loc in [sym_curve_g2()] {
            let pairing = loc.residue_pairing();
            for (i, row) in pairing.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    let expect = if i == j { loc.proto.one() } else { loc.proto.zero() };
                    assert_eq!(*v, expect, "hyperelliptic pairing ({i},{j})");
                }
            }
        }
        let loc = sym_curve_trig();
        let pairing = loc.residue_pairing();
        for (i, row) in pairing.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expect = if i == j { loc.proto.one() } else { loc.proto.zero() };
                assert_eq!(*v, expect, "trigonal pairing ({i},{j})");
            }
        }
    }

    #[test]
    fn winding_numerators_genus2() {
        let loc = sym_curve_g2();
        let names = ["a0", "a1", "a2", "a3", "a4"];
        let a3 = SymPoly::var(&names, 3);
        let a4 = SymPoly::var(&names, 4);
        let r = loc.winding_numerators(6);
        // R_1 = (1, 0)
        assert_eq!(r[0][0], loc.proto.one());
        assert!(r[0][1].is_zero());
        // R_2, R_4, R_6 = 0
        for k in [2usize, 4, 6] {
            assert!(r[k - 1].iter().all(|c| c.is_zero()), "R_{k}");
        }
        // R_3 = (-a4/8, 1)
        assert_eq!(r[2][0], a4.scale(&rat(-1, 8)));
        assert_eq!(r[2][1], loc.proto.one());
        // R_5 = (-a3/8 + 3 a4^2/128, -a4/8)
        assert_eq!(r[4][0], a3.scale(&rat(-1, 8)).add(&a4.mul(&a4).scale(&rat(3, 128))));
        assert_eq!(r[4][1], a4.scale(&rat(-1, 8)));
    }

    #[test]
    fn two_polar_symmetry_and_diagonal() {
        let curve = CurveModel::Hyperelliptic(
            HyperellipticCurve::from_branch_points(vec![-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap(),
        );
        let xv = Complex64::new(0.4, 0.3);
        let zv = Complex64::new(-1.3, 0.7);
        let CurveModel::Hyperelliptic(h) = &curve else { unreachable!() };
        let y2 = |x: Complex64| {
            h.lambda()
                .iter()
                .enumerate()
                .map(|(k, l)| l * x.powu(k as u32))
                .sum::<Complex64>()
        };
        let yv = y2(xv).sqrt();
        let wv = y2(zv).sqrt();
        let a = curve.two_polar((xv, yv), (zv, wv));
        let b = curve.two_polar((zv, wv), (xv, yv));
        assert!((a - b).norm() < 1e-10 * a.norm().max(1.0));
        // diagonal of the 2-polar proper: F(x,x) = 2 y(x)^2
        let f = h.f_polar(xv, xv);
        assert!((f - 2.0 * y2(xv)).norm() < 1e-10 * f.norm());

        // trigonal: T(x,x) = 3 y^3
        let t = CyclicTrigonalCurve::new([
            Complex64::new(0.3, 0.0),
            Complex64::new(-1.1, 0.0),
            Complex64::new(0.7, 0.0),
            Complex64::new(2.0, 0.0),
        ]);
        let y3 = |x: Complex64| {
            t.quartic()
                .iter()
                .enumerate()
                .map(|(k, q)| q * x.powu(k as u32))
                .sum::<Complex64>()
        };
        let tv = t.t_polar(xv, xv);
        assert!((tv - 3.0 * y3(xv)).norm() < 1e-10 * tv.norm().max(1.0));
    }

    #[test]
    fn mu_alg_genus2_symbolic() {
        let loc = sym_curve_g2();
        let names = ["a0", "a1", "a2", "a3", "a4"];
        let a2 = SymPoly::var(&names, 2);
        let a3 = SymPoly::var(&names, 3);
        let a4 = SymPoly::var(&names, 4);
        let mu = loc.mu_alg_table(8).unwrap();
        // Taylor coefficients: twice the printed half-normalised table.
        assert_eq!(mu[0][0], a4.scale(&rat(-1, 8)));
        assert_eq!(mu[0][2], a3.scale(&rat(-1, 8)).add(&a4.mul(&a4).scale(&rat(3, 128))));
        assert_eq!(
            mu[0][4],
            a2.scale(&rat(-1, 8))
                .add(&a3.mul(&a4).scale(&rat(3, 64)))
                .add(&a4.mul(&a4).mul(&a4).scale(&rat(-5, 1024)))
        );
        assert_eq!(
            mu[2][2],
            a2.scale(&rat(-3, 8))
                .add(&a3.mul(&a4).scale(&rat(1, 16)))
                .add(&a4.mul(&a4).mul(&a4).scale(&rat(-3, 512)))
        );
        // vanishing for odd index, and symmetry
        for i in 0..=8usize {
            for j in 0..=(8 - i) {
                assert_eq!(mu[i][j], mu[j][i]);
                if i % 2 == 1 || j % 2 == 1 {
                    assert!(mu[i][j].is_zero(), "mu[{i}][{j}] = {}", mu[i][j]);
                }
            }
        }
    }

    #[test]
    fn mu_alg_trigonal_symbolic() {
        let loc = sym_curve_trig();
        let names = ["b3", "b6", "b9", "b12"];
        let b3 = SymPoly::var(&names, 0);
        let b6 = SymPoly::var(&names, 1);
        let mu = loc.mu_alg_table(10).unwrap();
        // cyclic vanishing: mu_ij = 0 unless i + j + 2 = 0 mod 3
        for i in 0..=10usize {
            for j in 0..=(10 - i) {
                assert_eq!(mu[i][j], mu[j][i]);
                if (i + j + 2) % 3 != 0 {
                    assert!(mu[i][j].is_zero(), "mu[{i}][{j}] = {}", mu[i][j]);
                }
            }
        }
        assert!(mu[0][0].is_zero());
        // paper values (half-normalised): mu01 = -2/3 b3, mu04 = -2/3 b6 + 5/9 b3^2,
        // mu13 = -2/3 b6 + 4/9 b3^2, mu22 = 0
        assert_eq!(mu[0][1], b3.scale(&rat(-2, 3)));
        assert_eq!(mu[0][4], b6.scale(&rat(-2, 3)).add(&b3.mul(&b3).scale(&rat(5, 9))));
        assert_eq!(mu[1][3], b6.scale(&rat(-2, 3)).add(&b3.mul(&b3).scale(&rat(4, 9))));
        assert!(mu[2][2].is_zero());
    }
}
