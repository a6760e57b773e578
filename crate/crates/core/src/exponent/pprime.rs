use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{capacity_lower_bound, h1};
use crate::channel::{choi_state, DenseOperator, ErrorBasis, QuantumChannel};
use crate::error::{Error, Result};

/// Default number of random starts for the `p'` search.
pub const DEFAULT_STARTS: usize = 16;
const DEFAULT_SEED: u64 = 0x5eed;

/// Largest overlap of the Choi state with a maximally entangled qubit pair.
#[derive(Debug, Clone)]
pub struct PPrime {
    /// `1 - max_η <η|M|η>`.
    pub p_prime: f64,
    /// The maximiser `(x, y, -y*, x*)` with `|x|^2 + |y|^2 = 1/2`.
    pub eta: [Complex64; 4],
}

/// Maps `r = (Re x, Im x, Re y, Im y)` to `η = (x, y, -y*, x*)`.
fn embedding() -> DenseOperator {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    DenseOperator::from_row_slice(
        4,
        4,
        &[
            one, i, z, z, //
            z, z, one, i, //
            z, z, -one, i, //
            one, -i, z, z,
        ],
    )
}

fn require_qubit(ch: &QuantumChannel) -> Result<()> {
    if ch.modulus() != 2 || ch.m() != 1 {
        return Err(Error::UnsupportedDimension(ch.dim() as u32));
    }
    Ok(())
}

/// `p'` with [`DEFAULT_STARTS`] starts and a fixed seed.
pub fn p_prime(ch: &QuantumChannel) -> Result<PPrime> {
    p_prime_seeded(ch, DEFAULT_STARTS, DEFAULT_SEED)
}

/// Multi-start projected ascent of `r^T S r` on the sphere `|r|^2 = 1/2`,
/// where `S = Re(T† M T)` is the Choi state seen through the
/// maximally-entangled parameterisation `T`.
pub fn p_prime_seeded(ch: &QuantumChannel, starts: usize, seed: u64) -> Result<PPrime> {
    require_qubit(ch)?;
    let m = choi_state(ch)?;
    let t = embedding();
    let s: DMatrix<f64> = (t.adjoint() * &m * &t).map(|z| z.re);
    let s = (&s + s.transpose()) * 0.5;
    // Shift so that S + σI is positive definite; the ascent step is then a
    // power iteration and increases the objective monotonically.
    let sigma = s.norm() + 1.0;
    let shifted = &s + DMatrix::identity(4, 4) * sigma;
    let radius = 0.5f64.sqrt();
    let objective = |r: &DVector<f64>| r.dot(&(&s * r));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, DVector<f64>)> = None;
    for _ in 0..starts.max(1) {
        let mut r = DVector::from_fn(4, |_, _| StandardNormal.sample(&mut rng));
        r *= radius / r.norm();
        let mut value = objective(&r);
        for _ in 0..100_000 {
            let mut next = &shifted * &r;
            next *= radius / next.norm();
            let next_value = objective(&next);
            r = next;
            let done = (next_value - value).abs() < 1e-16;
            value = next_value;
            if done {
                break;
            }
        }
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, r));
        }
    }
    let (value, r) = best.expect("at least one start");
    let (x, y) = (Complex64::new(r[0], r[1]), Complex64::new(r[2], r[3]));
    Ok(PPrime {
        p_prime: (1.0 - value).clamp(0.0, 1.0),
        eta: [x, y, -y.conj(), x.conj()],
    })
}

/// The unitary `U = √2 [[x, -y*], [y, x*]]`, whose matrix entries are
/// `√2 η[j*2 + i]`; then `P_{U†A}((0,0)) = <η|M|η>`.
pub fn preprocessing_unitary(eta: &[Complex64; 4]) -> DenseOperator {
    let s = 2f64.sqrt();
    DenseOperator::from_fn(2, 2, |i, j| eta[j * 2 + i] * s)
}

/// Capacity bound before and after the entangled-state preprocessing,
/// compared with `1 - H_1(p')`.
#[derive(Debug, Clone)]
pub struct BoundReport {
    /// `1 - H(P_A)` in the standard basis.
    pub capacity_lb: f64,
    /// `1 - H(P_{UA})` for the constructed preprocessing.
    pub preprocessed_lb: f64,
    /// `1 - H_1(p')`.
    pub rival_lb: f64,
    pub p_prime: f64,
    pub eta: [Complex64; 4],
    /// `P_{UA}((0,0))`, equal to `1 - p'`.
    pub preprocessed_identity_prob: f64,
}

impl BoundReport {
    /// `preprocessed_lb - rival_lb`.
    pub fn slack(&self) -> f64 {
        self.preprocessed_lb - self.rival_lb
    }
}

pub fn bound_comparison(ch: &QuantumChannel) -> Result<BoundReport> {
    bound_comparison_seeded(ch, DEFAULT_STARTS, DEFAULT_SEED)
}

/// Builds `U` from the `p'` maximiser, checks `P_{UA}((0,0)) = 1 - p'`
/// within `1e-6` and `1 - H(P_{UA}) >= 1 - H_1(p') - 1e-8`.
pub fn bound_comparison_seeded(
    ch: &QuantumChannel,
    starts: usize,
    seed: u64,
) -> Result<BoundReport> {
    require_qubit(ch)?;
    let basis = ErrorBasis::standard(2)?;
    let pp = p_prime_seeded(ch, starts, seed)?;
    let u = preprocessing_unitary(&pp.eta);
    let processed = ch.compose_unitary(&u.adjoint())?;
    let p_ua = processed.error_distribution(&basis)?;
    let report = BoundReport {
        capacity_lb: capacity_lower_bound(&ch.error_distribution(&basis)?),
        preprocessed_lb: capacity_lower_bound(&p_ua),
        rival_lb: 1.0 - h1(pp.p_prime),
        p_prime: pp.p_prime,
        eta: pp.eta,
        preprocessed_identity_prob: p_ua.probs()[0],
    };
    let identity_gap = (report.preprocessed_identity_prob - (1.0 - report.p_prime)).abs();
    if identity_gap > 1e-6 {
        return Err(Error::InvariantViolation(format!(
            "P_UA((0,0)) = {} differs from 1 - p' = {}",
            report.preprocessed_identity_prob,
            1.0 - report.p_prime
        )));
    }
    if report.slack() < -1e-8 {
        return Err(Error::InvariantViolation(format!(
            "1 - H(P_UA) = {} is below 1 - H_1(p') = {}",
            report.preprocessed_lb, report.rival_lb
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::is_unitary;
    use nalgebra::SymmetricEigen;

    fn eigen_oracle(ch: &QuantumChannel) -> f64 {
        let t = embedding();
        let s: DMatrix<f64> = (t.adjoint() * choi_state(ch).unwrap() * &t).map(|z| z.re);
        let top = SymmetricEigen::new((&s + s.transpose()) * 0.5)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        1.0 - 0.5 * top
    }

    #[test]
    fn amplitude_damping() {
        for gamma in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let ch = QuantumChannel::amplitude_damping(gamma).unwrap();
            let pp = p_prime(&ch).unwrap();
            let want = 1.0 - (2.0 - gamma + 2.0 * (1.0f64 - gamma).sqrt()) / 4.0;
            assert!(
                (pp.p_prime - want).abs() < 1e-9,
                "{gamma}: {} vs {want}",
                pp.p_prime
            );
            assert!((pp.p_prime - eigen_oracle(&ch)).abs() < 1e-9);
        }
    }

    #[test]
    fn identity_and_depolarizing() {
        let pp = p_prime(&QuantumChannel::identity(2).unwrap()).unwrap();
        assert!(pp.p_prime < 1e-12);
        let norm: f64 = pp.eta.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        let ch = QuantumChannel::depolarizing(0.1).unwrap();
        assert!((p_prime(&ch).unwrap().p_prime - 0.1).abs() < 1e-9);
        assert!(matches!(
            p_prime(&QuantumChannel::identity(3).unwrap()),
            Err(Error::UnsupportedDimension(3))
        ));
    }

    #[test]
    fn comparison_reports() {
        let id = bound_comparison(&QuantumChannel::identity(2).unwrap()).unwrap();
        assert!((id.capacity_lb - 1.0).abs() < 1e-12 && (id.rival_lb - 1.0).abs() < 1e-9);
        let dep = bound_comparison(&QuantumChannel::depolarizing(0.1).unwrap()).unwrap();
        assert!((dep.capacity_lb - dep.rival_lb).abs() < 1e-9);
        let ad = bound_comparison(&QuantumChannel::amplitude_damping(0.2).unwrap()).unwrap();
        assert!(ad.capacity_lb >= ad.rival_lb);
        assert!(is_unitary(&preprocessing_unitary(&ad.eta), 1e-12));
    }
}
