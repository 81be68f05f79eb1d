//! Packed exponent multi-indices for the flow variables `t_1..t_M`.
//!
//! An exponent vector `(m_1, ..., m_M)` is packed five bits per variable
//! into a `u64`, so `M <= 12` and every exponent must stay below 32.  The
//! graded weight of a monomial is `sum k * m_k` with `weight(t_k) = k`;
//! all series and polynomial layers truncate by this weight, which keeps
//! individual exponents far below the packing limit.

pub const MAX_VARS: usize = 12;
const BITS: u32 = 5;
const MASK: u64 = (1 << BITS) - 1;

/// Packed exponent multi-index. `Mono(0)` is the constant monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(pub u64);

impl Mono {
    pub const ONE: Mono = Mono(0);

    /// Monomial `t_k`, with `k` one-based.
    pub fn var(k: usize) -> Mono {
        assert!(k >= 1 && k <= MAX_VARS, "variable index out of range");
        Mono(1u64 << (BITS * (k as u32 - 1)))
    }

    pub fn from_exponents(exps: &[u32]) -> Mono {
        assert!(exps.len() <= MAX_VARS);
        let mut raw = 0u64;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e < 32, "exponent too large to pack");
            raw |= (e as u64) << (BITS * i as u32);
        }
        Mono(raw)
    }

    pub fn exponent(&self, k: usize) -> u32 {
        debug_assert!(k >= 1 && k <= MAX_VARS);
        ((self.0 >> (BITS * (k as u32 - 1))) & MASK) as u32
    }

    pub fn exponents(&self, m: usize) -> Vec<u32> {
        (1..=m).map(|k| self.exponent(k)).collect()
    }

    /// Graded weight `sum k * m_k`.
    pub fn weight(&self) -> u32 {
        let mut w = 0;
        let mut raw = self.0;
        let mut k = 1u32;
        while raw != 0 {
            w += k * (raw & MASK) as u32;
            raw >>= BITS;
            k += 1;
        }
        w
    }

    /// Total degree `sum m_k`.
    pub fn degree(&self) -> u32 {
        let mut d = 0;
        let mut raw = self.0;
        while raw != 0 {
            d += (raw & MASK) as u32;
            raw >>= BITS;
        }
        d
    }

    /// Product of monomials; exponents add fieldwise.  Safe without carry
    /// handling because weights are capped well below the packing limit,
    /// which is asserted in debug builds.
    pub fn mul(&self, other: &Mono) -> Mono {
        let r = Mono(self.0 + other.0);
        debug_assert!(
            (1..=MAX_VARS).all(|k| self.exponent(k) + other.exponent(k) == r.exponent(k)),
            "monomial exponent overflow"
        );
        r
    }

    pub fn is_one(&self) -> bool {
        self.0 == 0
    }
}

/// All monomials in `t_1..t_m` of graded weight exactly `w`, in increasing
/// packed order.  These are in bijection with partitions of `w` into parts
/// of size at most `m`.
pub fn monomials_of_weight(m: usize, w: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; m];
    fn rec(k: usize, rem: u32, m: usize, exps: &mut Vec<u32>, out: &mut Vec<Mono>) {
        if k > m {
            if rem == 0 {
                out.push(Mono::from_exponents(exps));
            }
            return;
        }
        let maxe = rem / k as u32;
        for e in 0..=maxe {
            exps[k - 1] = e;
            rec(k + 1, rem - e * k as u32, m, exps, out);
        }
        exps[k - 1] = 0;
    }
    rec(1, w, m, &mut exps, &mut out);
    out.sort();
    out
}

/// All monomials of weight `<= w`, grouped by weight.
pub fn monomials_up_to_weight(m: usize, w: u32) -> Vec<Vec<Mono>> {
    (0..=w).map(|g| monomials_of_weight(m, g)).collect()
}
