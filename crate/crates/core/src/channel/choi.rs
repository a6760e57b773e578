use nalgebra::SymmetricEigen;

use super::{c, DenseOperator, QuantumChannel, CP_TOLERANCE};
use crate::error::{Error, Result};
use crate::gfsym::checked_pow;

/// `[I ⊗ A](|Φ+><Φ+|)` with `|Φ+> = D^{-1/2} sum_j |j>|j>`; the reference
/// system is the first tensor factor.
///
/// Column `j * D + i` of `(I ⊗ A)|Φ+>` carries `A_ij / sqrt(D)`, so the
/// result is `(1/D) sum_u vec(A_u) vec(A_u)†` with `vec(A)[j*D + i] = A_ij`.
pub fn choi_state(ch: &QuantumChannel) -> Result<DenseOperator> {
    let dim = ch.dim();
    let mut m = DenseOperator::zeros(dim * dim, dim * dim);
    for a in ch.kraus() {
        let v = vectorize(a);
        m += &v * v.adjoint();
    }
    m /= c(dim as f64, 0.0);
    let min = min_eigenvalue(&m);
    if min < -CP_TOLERANCE {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: min,
        });
    }
    Ok(m)
}

fn vectorize(a: &DenseOperator) -> DenseOperator {
    let dim = a.nrows();
    DenseOperator::from_fn(dim * dim, 1, |k, _| a[(k % dim, k / dim)])
}

fn min_eigenvalue(m: &DenseOperator) -> f64 {
    let herm = (m + m.adjoint()) * c(0.5, 0.0);
    SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Recovers a Kraus set from a Choi state on `(C^d)^{⊗m} ⊗ (C^d)^{⊗m}`.
///
/// `D·M = sum_k (D λ_k) e_k e_k†`; each eigenvector with `λ_k > 0` is
/// reshaped back through `vec` into `A_k = sqrt(D λ_k) unvec(e_k)`.
pub fn kraus_from_choi(m: &DenseOperator, d: u32) -> Result<QuantumChannel> {
    let total = m.nrows();
    if !m.is_square() {
        return Err(Error::Dimension("Choi matrix must be square".into()));
    }
    let (dim, factors) = (1..=12)
        .map(|f| (checked_pow(d, f).unwrap_or(u64::MAX) as usize, f))
        .find(|&(dim, _)| dim * dim == total)
        .ok_or_else(|| {
            Error::Dimension(format!("{total}x{total} is not a Choi matrix for d = {d}"))
        })?;
    let herm = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min < -CP_TOLERANCE {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: min,
        });
    }
    let trace: f64 = eig.eigenvalues.iter().map(|l| l.max(0.0)).sum();
    let mut kraus = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= 1e-14 * trace.max(1.0) {
            continue;
        }
        let scale = (dim as f64 * lambda).sqrt();
        let e = eig.eigenvectors.column(k);
        kraus.push(DenseOperator::from_fn(dim, dim, |i, j| {
            e[j * dim + i] * scale
        }));
    }
    QuantumChannel::new(d, factors, kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{max_abs_diff, ErrorBasis};

    fn phi_plus(d: usize) -> DenseOperator {
        DenseOperator::from_fn(d * d, d * d, |r, s| {
            if r % (d + 1) == 0 && s % (d + 1) == 0 {
                c(1.0 / d as f64, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    #[test]
    fn identity_choi_is_phi_plus() {
        for d in [2u32, 3] {
            let m = choi_state(&QuantumChannel::identity(d).unwrap()).unwrap();
            assert!(max_abs_diff(&m, &phi_plus(d as usize)) < 1e-15);
        }
    }

    #[test]
    fn dephasing_choi() {
        let mut p0 = DenseOperator::zeros(2, 2);
        p0[(0, 0)] = c(1.0, 0.0);
        let mut p1 = DenseOperator::zeros(2, 2);
        p1[(1, 1)] = c(1.0, 0.0);
        let ch = QuantumChannel::new(2, 1, vec![p0, p1]).unwrap();
        let m = choi_state(&ch).unwrap();
        let mut want = DenseOperator::zeros(4, 4);
        want[(0, 0)] = c(0.5, 0.0);
        want[(3, 3)] = c(0.5, 0.0);
        assert!(max_abs_diff(&m, &want) < 1e-15);

        let back = kraus_from_choi(&want, 2).unwrap();
        let p = back
            .error_distribution(&ErrorBasis::standard(2).unwrap())
            .unwrap();
        let want_p = [0.5, 0.5, 0.0, 0.0];
        for (a, b) in p.probs().iter().zip(want_p) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn amplitude_damping_coherence() {
        let gamma: f64 = 0.3;
        let m = choi_state(&QuantumChannel::amplitude_damping(gamma).unwrap()).unwrap();
        assert!((m[(0, 3)] - c((1.0 - gamma).sqrt() / 2.0, 0.0)).norm() < 1e-15);
        let trace: f64 = (0..4).map(|i| m[(i, i)].re).sum();
        assert!((trace - 1.0).abs() < 1e-15);
        let round = choi_state(&kraus_from_choi(&m, 2).unwrap()).unwrap();
        assert!(max_abs_diff(&round, &m) < 1e-9);
    }

    #[test]
    fn phi_plus_gives_unitary_kraus() {
        let ch = kraus_from_choi(&phi_plus(2), 2).unwrap();
        assert_eq!(ch.kraus().len(), 1);
        let a = &ch.kraus()[0];
        // a single Kraus operator proportional to I
        let phase = a[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(a, &(DenseOperator::identity(2, 2) * phase)) < 1e-12);
    }

    #[test]
    fn rejects_non_positive_and_non_tp() {
        let mut bad = phi_plus(2);
        bad[(1, 1)] = c(-0.2, 0.0);
        assert!(matches!(
            kraus_from_choi(&bad, 2),
            Err(Error::NotCompletelyPositive { .. })
        ));
        let doubled = phi_plus(2) * c(2.0, 0.0);
        assert!(matches!(
            kraus_from_choi(&doubled, 2),
            Err(Error::Validation { .. })
        ));
        assert!(kraus_from_choi(&DenseOperator::identity(5, 5), 2).is_err());
    }
}
