//! Entropy, divergence, the exponent `E(R,P)` and the capacity-type lower
//! bounds built from them.
//!
//! All entropies of [`ErrorDistribution`]s are in base-`d` logarithms. The
//! qubit-only rival bound uses bits.

mod pprime;
mod solver;

pub use pprime::{
    bound_comparison, bound_comparison_seeded, p_prime, p_prime_seeded, preprocessing_unitary,
    BoundReport, PPrime, DEFAULT_STARTS,
};
pub use solver::{exponent, exponent_tilted, tilted_family_minimum, ExponentResult};

use crate::channel::ErrorDistribution;
use crate::error::{Error, Result};

/// Tolerance of the primal/tilted agreement contract.
pub const SOLVER_AGREEMENT: f64 = 1e-6;

/// `-sum q log_base q` with `0 log 0 = 0`.
pub(crate) fn entropy_raw(q: &[f64], base: f64) -> f64 {
    -q.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
        / base.ln()
}

/// `sum q log_base(q/p)`, `+inf` when `q` puts mass where `p` has none.
pub(crate) fn divergence_raw(q: &[f64], p: &[f64], base: f64) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in q.iter().zip(p) {
        if a <= 0.0 {
            continue;
        }
        if b <= 0.0 {
            return f64::INFINITY;
        }
        acc += a * (a / b).ln();
    }
    (acc / base.ln()).max(0.0)
}

/// `H(Q)` in base `d`.
pub fn entropy(q: &ErrorDistribution) -> f64 {
    entropy_raw(q.probs(), q.modulus() as f64)
}

/// `D(Q||P)` in base `d`.
pub fn divergence(q: &ErrorDistribution, p: &ErrorDistribution) -> Result<f64> {
    if q.modulus() != p.modulus() {
        return Err(Error::Dimension(
            "distributions live on different alphabets".into(),
        ));
    }
    Ok(divergence_raw(q.probs(), p.probs(), q.modulus() as f64))
}

/// `D(Q||P) + |1 - H(Q) - R|^+`, the function minimised by `E(R,P)`.
pub fn exponent_objective(r: f64, q: &ErrorDistribution, p: &ErrorDistribution) -> Result<f64> {
    Ok(divergence(q, p)? + (1.0 - entropy(q) - r).max(0.0))
}

/// `1 - H(P)`; negative values are returned unchanged.
pub fn capacity_lower_bound(p: &ErrorDistribution) -> f64 {
    1.0 - entropy(p)
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_raw(&[p, 1.0 - p], 2.0)
}

/// `H_1(p) = h(p) + p log2 3`.
pub fn h1(p: f64) -> f64 {
    binary_entropy(p) + p * 3f64.log2()
}

/// The root of `1 - H_1(p)` in `(0, 1/2)`, by bisection.
pub fn h1_root() -> f64 {
    let (mut lo, mut hi) = (1e-6, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - h1(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed form of `1 - H(P_A)` for amplitude damping with parameter `γ`,
/// in bits.
pub fn amplitude_damping_bound(gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Argument(format!("gamma = {gamma} is not in [0, 1]")));
    }
    let half = gamma / 2.0;
    let inner = if gamma < 1.0 {
        0.5 + (1.0 - gamma).sqrt() / (2.0 - gamma)
    } else {
        0.5
    };
    Ok(1.0 - binary_entropy(half) - (1.0 - half) * binary_entropy(inner) - half)
}

/// Finite-length fidelity bound `1 - 2d^2 (n+1)^{2(d^2-1)} d^{-nE}` for a
/// given exponent value, evaluated in logarithms.
pub fn fidelity_bound_from_exponent(n: usize, d: u32, e: f64) -> f64 {
    let df = d as f64;
    let log_term = (2.0 * df * df).ln() / df.ln()
        + 2.0 * (df * df - 1.0) * ((n as f64) + 1.0).ln() / df.ln()
        - n as f64 * e;
    1.0 - df.powf(log_term)
}

/// The fidelity lower bound for length-`n` codes of `k` information qudits
/// at rate `R`, requiring `0 <= R <= 1` and `k <= ceil(R n)`.
pub fn theorem_bound(n: usize, k: usize, r: f64, p: &ErrorDistribution) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Argument(format!("rate {r} is not in [0, 1]")));
    }
    if n == 0 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    let max_k = (r * n as f64 - 1e-12).ceil().max(0.0) as usize;
    if k > max_k {
        return Err(Error::Argument(format!(
            "k = {k} exceeds ceil(R n) = {max_k}"
        )));
    }
    let e = exponent(r, p).value;
    Ok(fidelity_bound_from_exponent(n, p.modulus(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_and_divergence_examples() {
        let u = ErrorDistribution::uniform(2).unwrap();
        assert!((entropy(&u) - 2.0).abs() < 1e-15);
        assert_eq!(divergence(&u, &u).unwrap(), 0.0);
        let q = ErrorDistribution::point_mass(2, 0, 0).unwrap();
        let p = ErrorDistribution::depolarizing(2, 0.1).unwrap();
        assert!((divergence(&q, &p).unwrap() - (1.0f64 / 0.9).log2()).abs() < 1e-15);
        assert_eq!(divergence(&p, &q).unwrap(), f64::INFINITY);
        let u3 = ErrorDistribution::uniform(3).unwrap();
        assert!((entropy(&u3) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn h1_values() {
        assert_eq!(h1(0.0), 0.0);
        assert!((h1(1.0) - 3f64.log2()).abs() < 1e-15);
        let root = h1_root();
        assert!((root - 0.1893).abs() < 5e-4, "{root}");
        assert!(h1(root) - 1.0 < 1e-14);
    }

    #[test]
    fn depolarizing_entropy_is_h1() {
        for p in [0.01, 0.1, 0.3] {
            let dist = ErrorDistribution::depolarizing(2, p).unwrap();
            assert!((capacity_lower_bound(&dist) - (1.0 - h1(p))).abs() < 1e-14);
        }
    }

    #[test]
    fn amplitude_damping_endpoints() {
        assert!((amplitude_damping_bound(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((amplitude_damping_bound(1.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(amplitude_damping_bound(1.5).is_err());
    }

    #[test]
    fn theorem_bound_values() {
        let id = ErrorDistribution::point_mass(2, 0, 0).unwrap();
        let b = theorem_bound(100, 50, 0.5, &id).unwrap();
        let want = 1.0 - 8.0 * 101f64.powi(6) * 2f64.powi(-50);
        assert!((b - want).abs() < 1e-12, "{b} vs {want}");
        assert!(theorem_bound(100, 51, 0.5, &id).is_err());
        assert!(theorem_bound(10, 0, 1.5, &id).is_err());
        // E = 0 leaves the polynomial prefactor alone
        let e0 = fidelity_bound_from_exponent(3, 2, 0.0);
        assert!((e0 - (1.0 - 8.0 * 4f64.powi(6))).abs() < 1e-6);
        let vacuous = theorem_bound(10, 5, 0.5, &id).unwrap();
        assert!(vacuous < 0.0);
    }
}
