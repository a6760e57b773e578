use std::collections::HashMap;

use num_rational::Ratio;

use super::{checked_pow, enumerate_self_orthogonal, SymplecticVector};
use crate::error::{Error, Result};

/// Result of the exhaustive count of `A(x) = { L in A_so : x in L^⊥ \ {0} }`.
#[derive(Debug, Clone, PartialEq)]
pub struct WittCensus {
    /// `|A_so|`: self-orthogonal subspaces of dimension `n - k'`.
    pub subspaces: u64,
    /// `|A(x)|` for nonzero `x` (identical for all of them).
    pub per_vector: u64,
    /// `|A(0)|`; zero by definition.
    pub at_zero: u64,
    /// `|A(x)| / |A_so|`.
    pub observed: Ratio<u64>,
    /// `(d^{n+k'} - 1) / (d^{2n} - 1)`.
    pub formula: Ratio<u64>,
}

impl WittCensus {
    pub fn matches(&self) -> bool {
        self.observed == self.formula
    }
}

/// Enumerates `A_so` and, for every vector `x`, counts the members whose
/// dual contains `x` as a nonzero element. Exact integer arithmetic
/// throughout.
pub fn witt_ratio_census(n: usize, kprime: usize, d: u32) -> Result<WittCensus> {
    if kprime > n {
        return Err(Error::Argument(format!("k' = {kprime} exceeds n = {n}")));
    }
    let space =
        checked_pow(d, 2 * n).ok_or_else(|| Error::Resource("F_d^{2n} too large".into()))?;
    let mut counts: HashMap<SymplecticVector, u64> = HashMap::new();
    let mut subspaces = 0u64;
    for l in enumerate_self_orthogonal(n, n - kprime, d)? {
        subspaces += 1;
        for x in l.dual().elements().filter(|x| !x.is_zero()) {
            *counts.entry(x).or_default() += 1;
        }
    }
    let nonzero = space - 1;
    if counts.len() as u64 != nonzero {
        return Err(Error::InvariantViolation(format!(
            "only {} of {nonzero} nonzero vectors lie in some L^⊥",
            counts.len()
        )));
    }
    let mut values = counts.values().copied();
    let per_vector = values.next().unwrap_or(0);
    if let Some(other) = values.find(|&c| c != per_vector) {
        return Err(Error::InvariantViolation(format!(
            "|A(x)| is not constant over nonzero x: {per_vector} vs {other}"
        )));
    }
    let top = checked_pow(d, n + kprime).expect("d^{n+k'} <= d^{2n}") - 1;
    Ok(WittCensus {
        subspaces,
        per_vector,
        at_zero: 0,
        observed: Ratio::new(per_vector, subspaces),
        formula: Ratio::new(top, nonzero),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_fifteenths() {
        let c = witt_ratio_census(2, 1, 2).unwrap();
        assert_eq!(c.subspaces, 15);
        assert_eq!(c.per_vector, 7);
        assert_eq!(c.observed, Ratio::new(7, 15));
        assert!(c.matches());
        assert_eq!(c.at_zero, 0);
    }

    #[test]
    fn full_rate_edge() {
        // k' = n: A_so = {0}, L^⊥ is everything.
        let c = witt_ratio_census(2, 2, 2).unwrap();
        assert_eq!(c.subspaces, 1);
        assert_eq!(c.observed, Ratio::new(1, 1));
        assert!(c.matches());
    }

    #[test]
    fn rejects_bad_rate() {
        assert!(witt_ratio_census(2, 3, 2).is_err());
    }
}
