use std::collections::BTreeMap;

use super::{all_vectors, SymplecticVector};
use crate::error::Result;

/// The type (empirical symbol distribution) of a sequence in `X^n`,
/// `X = F_d^2`. Symbol `(u, v)` is stored at index `u * d + v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeDistribution {
    d: u32,
    n: usize,
    counts: Vec<usize>,
}

impl TypeDistribution {
    pub fn modulus(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn count(&self, u: u32, v: u32) -> usize {
        self.counts[(u * self.d + v) as usize]
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.n as f64)
            .collect()
    }

    /// Entropy in base-`d` units.
    pub fn entropy(&self) -> f64 {
        let n = self.n as f64;
        let ln_d = (self.d as f64).ln();
        -self
            .counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                p * p.ln()
            })
            .sum::<f64>()
            / ln_d
    }

    /// `prod_u c_u^{c_u} = n^n d^{-n H}` as an exact integer. Larger means
    /// lower entropy, so it orders sequences of equal length by entropy
    /// without rounding. `None` on `u128` overflow.
    pub fn concentration(&self) -> Option<u128> {
        let mut acc = 1u128;
        for &c in &self.counts {
            for _ in 0..c {
                acc = acc.checked_mul(c as u128)?;
            }
        }
        Some(acc)
    }
}

/// Empirical distribution of the `n` symbol pairs of `x`.
pub fn type_of(x: &SymplecticVector) -> TypeDistribution {
    let d = x.modulus();
    let mut counts = vec![0usize; (d * d) as usize];
    for i in 0..x.n() {
        counts[x.symbol_index(i)] += 1;
    }
    TypeDistribution {
        d,
        n: x.n(),
        counts,
    }
}

/// One type class `T_Q^n` found by enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeClass {
    pub counts: Vec<usize>,
    pub size: u64,
    /// `H(Q)` in base-`d` units.
    pub entropy: f64,
}

/// Exhaustive census of the types of `X^n`.
#[derive(Debug, Clone)]
pub struct TypeCensus {
    pub d: u32,
    pub n: usize,
    pub classes: Vec<TypeClass>,
}

impl TypeCensus {
    /// `|Q_n|`.
    pub fn num_types(&self) -> usize {
        self.classes.len()
    }

    /// `sum_Q |T_Q^n|`; equals `d^{2n}`.
    pub fn total(&self) -> u64 {
        self.classes.iter().map(|c| c.size).sum()
    }
}

/// Enumerates every sequence of `X^n` and groups them by type.
pub fn type_census(d: u32, n: usize) -> Result<TypeCensus> {
    let mut classes: BTreeMap<TypeDistribution, u64> = BTreeMap::new();
    for x in all_vectors(d, n)? {
        *classes.entry(type_of(&x)).or_default() += 1;
    }
    Ok(TypeCensus {
        d,
        n,
        classes: classes
            .into_iter()
            .map(|(t, size)| TypeClass {
                entropy: t.entropy(),
                counts: t.counts,
                size,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> SymplecticVector {
        SymplecticVector::parse(2, s).unwrap()
    }

    #[test]
    fn types_of_examples() {
        let t = type_of(&v("1000"));
        assert_eq!(t.count(1, 0), 1);
        assert_eq!(t.count(0, 0), 1);
        assert_eq!(t.probabilities(), vec![0.5, 0.0, 0.5, 0.0]);
        assert!((t.entropy() - 1.0).abs() < 1e-15);

        let z = type_of(&v("0000"));
        assert_eq!(z.probabilities(), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(z.entropy(), 0.0);

        let p = type_of(&v("0101"));
        assert_eq!(p.probabilities(), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn concentration_orders_entropy() {
        let a = type_of(&v("101000"));
        let b = type_of(&v("100111"));
        // a: counts {2,0,1,0}... -> 2^2 * 1 = 4; b: all distinct -> 1
        assert_eq!(a.concentration(), Some(4));
        assert_eq!(b.concentration(), Some(1));
        assert!(a.entropy() < b.entropy());
    }

    #[test]
    fn census_small() {
        let c = type_census(2, 2).unwrap();
        assert_eq!(c.total(), 16);
        // compositions of 2 into 4 parts
        assert_eq!(c.num_types(), 10);
    }
}
