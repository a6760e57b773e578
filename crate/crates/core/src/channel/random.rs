use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{DenseOperator, QuantumChannel};
use crate::error::{Error, Result};
use crate::gfsym::checked_pow;

fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseOperator {
    DenseOperator::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Orthonormal columns from the QR factorisation of a complex Gaussian
/// matrix, with the phases of `R`'s diagonal absorbed so the result is
/// Haar distributed.
fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseOperator {
    let qr = gaussian(rows, cols, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random `dim x dim` unitary.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DenseOperator {
    haar_isometry(dim, dim, rng)
}

/// Haar-random unit vector.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    let g = gaussian(dim, 1, rng);
    let norm = g.norm();
    DVector::from_fn(dim, |i, _| g[(i, 0)] / norm)
}

/// A random channel on `(C^d)^{⊗m}` with `kraus_count` Kraus operators,
/// cut from a Haar-random isometry `C^D -> C^{kD}`.
pub fn random_channel<R: Rng + ?Sized>(
    d: u32,
    m: usize,
    kraus_count: usize,
    rng: &mut R,
) -> Result<QuantumChannel> {
    let dim = checked_pow(d, m)
        .filter(|&x| x <= 64)
        .ok_or_else(|| Error::Resource("random channels are limited to d^m <= 64".into()))?
        as usize;
    if kraus_count == 0 || kraus_count > dim * dim {
        return Err(Error::Argument(format!(
            "kraus_count must be in 1..={}",
            dim * dim
        )));
    }
    let v = haar_isometry(kraus_count * dim, dim, rng);
    let kraus = (0..kraus_count)
        .map(|k| v.rows(k * dim, dim).into_owned())
        .collect();
    QuantumChannel::new(d, m, kraus)
}
