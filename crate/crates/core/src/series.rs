//! Truncated multivariate power series over complex doubles in `t_1..t_M`,
//! graded by `weight(t_k) = k` and closed under a weight bound `W`.
//!
//! Storage is dense-by-weight: one coefficient map per grade, so the Cauchy
//! product runs grade by grade and the truncation contract is explicit.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::mono::{Mono, MAX_VARS};
use crate::{Error, Result};

/// Engine bound on the weight truncation (and variable count).
pub const MAX_WEIGHT: u32 = 12;

#[derive(Debug, Clone)]
pub struct TauSeries {
    /// grades[w] holds the monomials of weight exactly w
    grades: Vec<BTreeMap<Mono, Complex64>>,
    nvars: usize,
    wmax: u32,
}

impl TauSeries {
    pub fn zero(nvars: usize, wmax: u32) -> TauSeries {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} flow variables");
        assert!(wmax <= MAX_WEIGHT, "weight bound above engine limit");
        TauSeries {
            grades: vec![BTreeMap::new(); wmax as usize + 1],
            nvars,
            wmax,
        }
    }

    pub fn constant(nvars: usize, wmax: u32, c: Complex64) -> TauSeries {
        let mut s = TauSeries::zero(nvars, wmax);
        s.add_to_coeff(Mono::ONE, c);
        s
    }

    pub fn one(nvars: usize, wmax: u32) -> TauSeries {
        TauSeries::constant(nvars, wmax, Complex64::new(1.0, 0.0))
    }

    pub fn var(nvars: usize, wmax: u32, k: usize) -> TauSeries {
        let mut s = TauSeries::zero(nvars, wmax);
        s.add_to_coeff(Mono::var(k), Complex64::new(1.0, 0.0));
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn weight_bound(&self) -> u32 {
        self.wmax
    }

    /// Stored coefficient of `m`, or an error when `m` lies beyond the
    /// truncation (distinguishing "unknown" from "zero").
    pub fn coeff(&self, m: &Mono) -> Result<Complex64> {
        let w = m.weight();
        if w > self.wmax {
            return Err(Error::Truncation(format!(
                "monomial weight {w} exceeds truncation bound {}",
                self.wmax
            )));
        }
        Ok(self.grades[w as usize].get(m).copied().unwrap_or_default())
    }

    pub fn constant_term(&self) -> Complex64 {
        self.grades[0].get(&Mono::ONE).copied().unwrap_or_default()
    }

    pub fn add_to_coeff(&mut self, m: Mono, c: Complex64) {
        let w = m.weight();
        if w > self.wmax || (c.re == 0.0 && c.im == 0.0) {
            return;
        }
        *self.grades[w as usize].entry(m).or_insert_with(Complex64::default) += c;
    }

    pub fn set_coeff(&mut self, m: Mono, c: Complex64) {
        let w = m.weight();
        assert!(w <= self.wmax);
        self.grades[w as usize].insert(m, c);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mono, &Complex64)> {
        self.grades.iter().flat_map(|g| g.iter())
    }

    fn check_compatible(&self, other: &TauSeries) -> Result<()> {
        if self.nvars != other.nvars || self.wmax != other.wmax {
            return Err(Error::validation(format!(
                "series shape mismatch: ({}, {}) vs ({}, {})",
                self.nvars, self.wmax, other.nvars, other.wmax
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &TauSeries) -> Result<TauSeries> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in other.iter() {
            out.add_to_coeff(*m, *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TauSeries) -> Result<TauSeries> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> TauSeries {
        let mut out = self.clone();
        for g in &mut out.grades {
            for v in g.values_mut() {
                *v *= c;
            }
        }
        out
    }

    /// Truncated Cauchy product, grade by grade with a fixed summation
    /// order so results are deterministic.
    pub fn mul(&self, other: &TauSeries) -> Result<TauSeries> {
        self.check_compatible(other)?;
        let mut out = TauSeries::zero(self.nvars, self.wmax);
        for wa in 0..=self.wmax {
            if self.grades[wa as usize].is_empty() {
                continue;
            }
            for wb in 0..=(self.wmax - wa) {
                if other.grades[wb as usize].is_empty() {
                    continue;
                }
                let grade = &mut out.grades[(wa + wb) as usize];
                for (ma, ca) in &self.grades[wa as usize] {
                    for (mb, cb) in &other.grades[wb as usize] {
                        *grade.entry(ma.mul(mb)).or_insert_with(Complex64::default) += ca * cb;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Truncated exponential.  A nonzero constant term `c` is handled as
    /// `e^c * exp(f - c)`.
    pub fn exp(&self) -> TauSeries {
        let c = self.constant_term();
        let mut g = self.clone();
        g.grades[0].clear();
        // sum g^n / n!, terminating at n = wmax since g has weight >= 1
        let mut acc = TauSeries::one(self.nvars, self.wmax);
        let mut pow = TauSeries::one(self.nvars, self.wmax);
        let mut fact = 1.0f64;
        for n in 1..=self.wmax {
            pow = pow.mul(&g).expect("shape preserved");
            fact *= n as f64;
            acc = acc
                .add(&pow.scale(Complex64::new(1.0 / fact, 0.0)))
                .expect("shape preserved");
        }
        acc.scale(c.exp())
    }

    /// Truncated logarithm; requires a nonzero constant term, which is
    /// normalised away first.
    pub fn log(&self) -> Result<TauSeries> {
        let c = self.constant_term();
        if c.norm() == 0.0 {
            return Err(Error::validation("series log requires a nonzero constant term"));
        }
        let mut u = self.scale(1.0 / c);
        u.grades[0].clear(); // u = f/c - 1
        let mut acc = TauSeries::constant(self.nvars, self.wmax, c.ln());
        let mut pow = TauSeries::one(self.nvars, self.wmax);
        for n in 1..=self.wmax {
            pow = pow.mul(&u)?;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            acc = acc.add(&pow.scale(Complex64::new(sign / n as f64, 0.0)))?;
        }
        Ok(acc)
    }

    /// Largest coefficient magnitude, useful for relative comparisons.
    pub fn max_abs(&self) -> f64 {
        self.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    /// Max-norm of the coefficientwise difference.
    pub fn max_diff(&self, other: &TauSeries) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_basics() {
        let m = 3;
        let w = 4;
        let f = TauSeries::one(m, w).add(&TauSeries::var(m, w, 1)).unwrap();
        let g = TauSeries::one(m, w).add(&TauSeries::var(m, w, 2)).unwrap();
        let fg = f.mul(&g).unwrap();
        assert_eq!(fg.coeff(&Mono::ONE).unwrap(), c(1.0, 0.0));
        assert_eq!(fg.coeff(&Mono::var(1)).unwrap(), c(1.0, 0.0));
        assert_eq!(fg.coeff(&Mono::var(2)).unwrap(), c(1.0, 0.0));
        assert_eq!(fg.coeff(&Mono::var(1).mul(&Mono::var(2))).unwrap(), c(1.0, 0.0));

        let zero = TauSeries::zero(m, w);
        assert_eq!(f.mul(&zero).unwrap().max_abs(), 0.0);

        // truncation contract: t_1^2 at W = 1 vanishes
        let t1 = TauSeries::var(2, 1, 1);
        let sq = t1.mul(&t1).unwrap();
        assert_eq!(sq.max_abs(), 0.0);

        // shape mismatch is an error
        assert!(f.mul(&TauSeries::one(m, 3)).is_err());
    }

    #[test]
    fn exp_examples() {
        let m = 2;
        let w = 6;
        let e = TauSeries::var(m, w, 1).exp();
        let mut fact = 1.0;
        for n in 0..=w {
            if n > 0 {
                fact *= n as f64;
            }
            let mono = Mono::from_exponents(&[n, 0]);
            assert!((e.coeff(&mono).unwrap() - c(1.0 / fact, 0.0)).norm() < 1e-15);
        }
        let one = TauSeries::zero(m, w).exp();
        assert!((one.constant_term() - c(1.0, 0.0)).norm() == 0.0);

        // exp(-1/2 q t_1^2) has t_1^2 coefficient -q/2
        let q = c(0.7, -0.3);
        let f = TauSeries::var(m, w, 1)
            .mul(&TauSeries::var(m, w, 1))
            .unwrap()
            .scale(-q / 2.0);
        let ef = f.exp();
        assert!((ef.coeff(&Mono::from_exponents(&[2, 0])).unwrap() + q / 2.0).norm() < 1e-15);
    }

    #[test]
    fn coefficient_contract() {
        let mut f = TauSeries::zero(2, 3);
        f.add_to_coeff(Mono::ONE, c(1.0, 0.0));
        f.add_to_coeff(Mono::var(2), c(3.0, 0.0));
        assert_eq!(f.coeff(&Mono::var(2)).unwrap(), c(3.0, 0.0));
        assert_eq!(f.coeff(&Mono::ONE).unwrap(), c(1.0, 0.0));
        assert_eq!(f.coeff(&Mono::var(1)).unwrap(), c(0.0, 0.0));
        assert!(f.coeff(&Mono::from_exponents(&[4])).is_err());
    }

    fn arb_series(m: usize, w: u32) -> impl Strategy<Value = TauSeries> {
        let monos: Vec<Mono> = crate::mono::monomials_up_to_weight(m, w)
            .into_iter()
            .flatten()
            .collect();
        let n = monos.len();
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(move |cs| {
            let mut s = TauSeries::zero(m, w);
            for (mono, (re, im)) in monos.iter().zip(cs) {
                s.add_to_coeff(*mono, c(re, im));
            }
            s
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ring_axioms((f, g, h) in (arb_series(4, 6), arb_series(4, 6), arb_series(4, 6))) {
            let scale = f.max_abs().max(g.max_abs()).max(h.max_abs()).max(1.0);
            let assoc = f.mul(&g).unwrap().mul(&h).unwrap()
                .max_diff(&f.mul(&g.mul(&h).unwrap()).unwrap()).unwrap();
            prop_assert!(assoc / (scale * scale * scale) < 1e-12);
            let distr = f.mul(&g.add(&h).unwrap()).unwrap()
                .max_diff(&f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()).unwrap();
            prop_assert!(distr / (scale * scale) < 1e-12);
        }

        #[test]
        fn exp_inverse_and_log(f in arb_series(4, 6)) {
            let prod = f.exp().mul(&f.scale(c(-1.0, 0.0)).exp()).unwrap();
            let dev = prod.sub(&TauSeries::one(4, 6)).unwrap().max_abs();
            prop_assert!(dev < 1e-10);

            // log(exp(f)) = f for zero constant term
            let mut g = f.clone();
            g.grades[0].clear();
            let back = g.exp().log().unwrap();
            prop_assert!(back.max_diff(&g).unwrap() < 1e-10);
        }
    }
}
