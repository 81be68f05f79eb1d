//! Coefficient-ring abstraction for the local-expansion machinery.
//!
//! Curve expansions run either over complex doubles (numeric mode) or over
//! exact polynomials in the curve coefficients (symbolic mode).  Only ring
//! operations plus rational scalars are needed; inversion is restricted to
//! units, which in symbolic mode means nonzero rational constants.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::sympoly::SymPoly;

pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero(&self) -> Self;
    fn one(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_ratio(&self, num: i64, den: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse, defined for units only.
    fn try_invert(&self) -> Option<Self>;
}

impl Scalar for Complex64 {
    fn zero(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one(&self) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_ratio(&self, num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn try_invert(&self) -> Option<Self> {
        if self.norm() == 0.0 {
            None
        } else {
            Some(self.finv())
        }
    }
}

impl Scalar for SymPoly {
    fn zero(&self) -> Self {
        self.scale(&BigRational::zero())
    }
    fn one(&self) -> Self {
        let names: Vec<&str> = self.names().iter().map(|s| s.as_str()).collect();
        SymPoly::from_int(&names, 1)
    }
    fn add(&self, other: &Self) -> Self {
        SymPoly::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        SymPoly::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        SymPoly::mul(self, other)
    }
    fn neg(&self) -> Self {
        SymPoly::neg(self)
    }
    fn from_ratio(&self, num: i64, den: i64) -> Self {
        let names: Vec<&str> = self.names().iter().map(|s| s.as_str()).collect();
        SymPoly::constant(&names, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
    fn is_zero(&self) -> bool {
        SymPoly::is_zero(self)
    }
    fn try_invert(&self) -> Option<Self> {
        let c = self.constant_value()?;
        if c.is_zero() {
            return None;
        }
        let names: Vec<&str> = self.names().iter().map(|s| s.as_str()).collect();
        Some(SymPoly::constant(&names, c.recip()))
    }
}

/// Numeric view of a scalar, used by tests and the numeric pipeline.
pub trait ToComplex {
    fn to_complex(&self) -> Complex64;
}

impl ToComplex for Complex64 {
    fn to_complex(&self) -> Complex64 {
        *self
    }
}

impl ToComplex for SymPoly {
    fn to_complex(&self) -> Complex64 {
        let c = self
            .constant_value()
            .expect("symbolic scalar is not a constant");
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        Complex64::new(n / d, 0.0)
    }
}
