//! Integer partitions, Frobenius coordinates, hooks and enumeration.
//!
//! A partition is stored as its weakly decreasing positive parts; trailing
//! zeros are dropped so that equality and hashing are canonical, and the
//! empty partition is a first-class value.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Integer partition `lambda_1 >= lambda_2 >= ... >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<u32>,
}

/// Frobenius coordinates `(a_1..a_r | b_1..b_r)`: arm/leg lengths of the
/// diagonal boxes of the Young diagram, both strictly decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusCoords {
    pub arms: Vec<u32>,
    pub legs: Vec<u32>,
}

impl Partition {
    /// Builds a partition from parts, dropping trailing zeros.
    ///
    /// Panics if the sequence increases anywhere.
    pub fn new(parts: impl Into<Vec<u32>>) -> Partition {
        let mut parts = parts.into();
        while parts.last() == Some(&0) {
            parts.pop();
        }
        assert!(
            parts.windows(2).all(|w| w[0] >= w[1]) && parts.iter().all(|&p| p > 0),
            "parts must be weakly decreasing and positive"
        );
        Partition { parts }
    }

    pub fn empty() -> Partition {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// `lambda_i` with the convention `lambda_i = 0` beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Particle coordinates `l_i = lambda_i - i` (zero-based `i`, so
    /// `l_i = part(i) - i - 1` in one-based terms); strictly decreasing.
    pub fn particle_coordinates(&self, n: usize) -> Vec<i64> {
        (0..n).map(|i| self.part(i) as i64 - (i as i64 + 1)).collect()
    }

    /// Conjugate (transposed) partition.
    pub fn conjugate(&self) -> Partition {
        if self.parts.is_empty() {
            return Partition::empty();
        }
        let cols = self.parts[0] as usize;
        let parts = (1..=cols)
            .map(|c| self.parts.iter().filter(|&&p| p as usize >= c).count() as u32)
            .collect::<Vec<_>>();
        Partition { parts }
    }

    /// Frobenius rank: number of diagonal boxes.
    pub fn rank(&self) -> usize {
        self.parts
            .iter()
            .enumerate()
            .take_while(|(i, &p)| p as usize > *i)
            .count()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let s = self
            .parts
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",");
        write!(f, "{s}")
    }
}

impl fmt::Display for FrobeniusCoords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arms = self.arms.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
        let legs = self.legs.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "({arms}|{legs})")
    }
}

/// Frobenius coordinates of a partition: `a_i = lambda_i - i` boxes right of
/// the `i`-th diagonal box and `b_i` from the conjugate diagram.
pub fn frobenius_of(p: &Partition) -> FrobeniusCoords {
    let conj = p.conjugate();
    let r = p.rank();
    let arms = (0..r).map(|i| p.part(i) - i as u32 - 1).collect();
    let legs = (0..r).map(|i| conj.part(i) - i as u32 - 1).collect();
    FrobeniusCoords { arms, legs }
}

/// Inverse of [`frobenius_of`].
pub fn partition_of_frobenius(fc: &FrobeniusCoords) -> Partition {
    assert_eq!(fc.arms.len(), fc.legs.len(), "rank mismatch");
    let r = fc.arms.len();
    debug_assert!(fc.arms.windows(2).all(|w| w[0] > w[1]));
    debug_assert!(fc.legs.windows(2).all(|w| w[0] > w[1]));
    // Row i (zero-based, i < r) has a_i + i + 1 boxes; rows below the
    // diagonal are recovered from the legs of the conjugate.
    let nrows = r + fc.legs.first().map(|&b| b as usize).unwrap_or(0);
    let mut parts = vec![0u32; nrows];
    for i in 0..r {
        parts[i] = fc.arms[i] + i as u32 + 1;
    }
    for i in 0..r {
        // Column i has legs[i] boxes below the diagonal: they occupy rows
        // r..r+? -- easier to add column contributions directly.
        for row in (i + 1)..=(i + fc.legs[i] as usize) {
            if row >= r {
                parts[row] += 1;
            }
        }
    }
    // Rows < r already counted their full length via arms.
    Partition::new(parts)
}

/// The hook partition `(a | b) = (a+1, 1^b)`.
pub fn hook_from(a: u32, b: u32) -> Partition {
    let mut parts = vec![a + 1];
    parts.extend(std::iter::repeat(1).take(b as usize));
    Partition::new(parts)
}

/// All partitions of weight `<= max_weight`, ordered by (weight ascending,
/// reverse-lexicographic within a weight).
pub fn partitions_up_to_weight(max_weight: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    for w in 0..=max_weight {
        let mut of_w = partitions_of_weight(w);
        // reverse-lexicographic: compare part sequences descending
        of_w.sort_by(|a, b| b.parts.cmp(&a.parts));
        out.extend(of_w);
    }
    out
}

/// All partitions of weight exactly `w` (unordered).
pub fn partitions_of_weight(w: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut stack = Vec::new();
    fn rec(rem: u32, maxpart: u32, stack: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition::new(stack.clone()));
            return;
        }
        let hi = rem.min(maxpart);
        for p in (1..=hi).rev() {
            stack.push(p);
            rec(rem - p, p, stack, out);
            stack.pop();
        }
    }
    rec(w, w.max(1), &mut stack, &mut out);
    if w == 0 {
        return vec![Partition::empty()];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frobenius_examples() {
        assert_eq!(
            frobenius_of(&Partition::empty()),
            FrobeniusCoords { arms: vec![], legs: vec![] }
        );
        // (3,3,1): diagonal boxes (1,1),(2,2); arms 2,1; legs 2,0
        let fc = frobenius_of(&Partition::new(vec![3, 3, 1]));
        assert_eq!(fc.arms, vec![2, 1]);
        assert_eq!(fc.legs, vec![2, 0]);
        // hooks: (a+1, 1^b) -> (a|b)
        for a in 0..6u32 {
            for b in 0..6u32 {
                let fc = frobenius_of(&hook_from(a, b));
                assert_eq!(fc.arms, vec![a]);
                assert_eq!(fc.legs, vec![b]);
            }
        }
    }

    #[test]
    fn hooks() {
        assert_eq!(hook_from(0, 0), Partition::new(vec![1]));
        assert_eq!(hook_from(2, 1), Partition::new(vec![3, 1]));
        assert_eq!(hook_from(0, 3), Partition::new(vec![1, 1, 1, 1]));
        assert_eq!(hook_from(2, 1).weight(), 4);
    }

    #[test]
    fn enumeration_matches_euler_recurrence() {
        // p(n) by the pentagonal number recurrence, as an independent count.
        let max = 10usize;
        let mut p = vec![0i64; max + 1];
        p[0] = 1;
        for n in 1..=max {
            let mut acc = 0i64;
            let mut k = 1i64;
            loop {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > n {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                acc += sign * p[n - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= n {
                    acc += sign * p[n - g2];
                }
                k += 1;
            }
            p[n] = acc;
        }
        let all = partitions_up_to_weight(max as u32);
        for n in 0..=max {
            let count = all.iter().filter(|q| q.weight() == n as u32).count() as i64;
            assert_eq!(count, p[n], "p({n})");
        }
        // spot-check the ordering contract
        let upto2 = partitions_up_to_weight(2);
        assert_eq!(
            upto2,
            vec![
                Partition::empty(),
                Partition::new(vec![1]),
                Partition::new(vec![2]),
                Partition::new(vec![1, 1]),
            ]
        );
        // no duplicates
        let mut seen = std::collections::HashSet::new();
        for q in &all {
            assert!(seen.insert(q.clone()));
        }
    }

    #[test]
    fn rendering() {
        assert_eq!(Partition::new(vec![3, 3, 1]).to_string(), "3,3,1");
        assert_eq!(frobenius_of(&Partition::new(vec![3, 3, 1])).to_string(), "(2,1|2,0)");
        assert_eq!(Partition::empty().to_string(), "0");
    }

    proptest! {
        #[test]
        fn frobenius_roundtrip_and_weight(parts in proptest::collection::vec(1u32..9, 0..8)) {
            let mut parts = parts;
            parts.sort_unstable_by(|a, b| b.cmp(a));
            let p = Partition::new(parts);
            let fc = frobenius_of(&p);
            prop_assert_eq!(partition_of_frobenius(&fc), p.clone());
            // weight = r + sum arms + sum legs
            let r = fc.arms.len() as u32;
            let w: u32 = r + fc.arms.iter().sum::<u32>() + fc.legs.iter().sum::<u32>();
            prop_assert_eq!(w, p.weight());
            // conjugation swaps arms and legs
            let fcc = frobenius_of(&p.conjugate());
            prop_assert_eq!(fcc.arms, fc.legs);
            prop_assert_eq!(fcc.legs, fc.arms);
        }
    }
}
