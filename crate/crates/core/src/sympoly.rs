//! Small multivariate polynomial ring over exact rationals in named
//! indeterminates (curve coefficients).  Used for the symbolic mode of the
//! local-expansion machinery, where tables like `mu^alg` come out as exact
//! polynomials in `alpha` or `beta`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial over `BigRational` in up to eight named indeterminates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymPoly {
    /// exponent vectors (fixed arity) -> coefficient
    terms: BTreeMap<Vec<u8>, BigRational>,
    names: Vec<String>,
}

impl SymPoly {
    pub fn zero(names: &[&str]) -> SymPoly {
        SymPoly {
            terms: BTreeMap::new(),
            names: names.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn constant(names: &[&str], c: BigRational) -> SymPoly {
        let mut p = SymPoly::zero(names);
        if !c.is_zero() {
            p.terms.insert(vec![0; p.names.len()], c);
        }
        p
    }

    pub fn from_int(names: &[&str], n: i64) -> SymPoly {
        SymPoly::constant(names, BigRational::from(BigInt::from(n)))
    }

    pub fn var(names: &[&str], idx: usize) -> SymPoly {
        let mut p = SymPoly::zero(names);
        let mut e = vec![0u8; p.names.len()];
        e[idx] = 1;
        p.terms.insert(e, BigRational::one());
        p
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    fn insert(&mut self, e: Vec<u8>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &SymPoly) -> SymPoly {
        debug_assert_eq!(self.names, other.names);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> SymPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &SymPoly) -> SymPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &SymPoly) -> SymPoly {
        let mut out = SymPoly::zero(&self.names.iter().map(|s| s.as_str()).collect::<Vec<_>>());
        out.names = self.names.clone();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> SymPoly {
        let mut out = self.clone();
        if c.is_zero() {
            out.terms.clear();
            return out;
        }
        for v in out.terms.values_mut() {
            *v = v.clone() * c;
        }
        out
    }

    /// Evaluates at rational values of the indeterminates.
    pub fn eval(&self, vals: &[BigRational]) -> BigRational {
        assert_eq!(vals.len(), self.names.len());
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    term *= &vals[i];
                }
            }
            acc += term;
        }
        acc
    }
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let ac = c.abs();
            let mut factors = Vec::new();
            if !ac.is_one() || e.iter().all(|&x| x == 0) {
                factors.push(ac.to_string());
            }
            for (i, &p) in e.iter().enumerate() {
                if p == 1 {
                    factors.push(self.names[i].clone());
                } else if p > 1 {
                    factors.push(format!("{}^{}", self.names[i], p));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let names = ["a", "b"];
        let a = SymPoly::var(&names, 0);
        let b = SymPoly::var(&names, 1);
        let p = a.mul(&a).sub(&b.scale(&BigRational::new(BigInt::from(1), BigInt::from(16))));
        assert_eq!(p.to_string(), "-1/16*b + a^2");
        // eval at a=2, b=32: 4 - 2 = 2
        let v = p.eval(&[
            BigRational::from(BigInt::from(2)),
            BigRational::from(BigInt::from(32)),
        ]);
        assert_eq!(v, BigRational::from(BigInt::from(2)));
    }
}
