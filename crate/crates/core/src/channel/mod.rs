//! Kraus channels on `d^m`-dimensional spaces and their description in the
//! error basis `N_(i,j) = X^i Z^j`.

mod basis;
mod choi;
mod distribution;
mod io;
mod kraus;
mod random;

pub use basis::ErrorBasis;
pub use choi::{choi_state, kraus_from_choi};
pub use distribution::{ErrorDistribution, ProductDistribution};
pub use io::ChannelFile;
pub use kraus::QuantumChannel;
pub use random::{random_channel, random_state, random_unitary};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A dense complex square matrix.
pub type DenseOperator = DMatrix<Complex64>;

/// Absolute tolerance for trace preservation and unitarity checks.
pub const TP_TOLERANCE: f64 = 1e-9;

/// Smallest admissible Choi eigenvalue.
pub const CP_TOLERANCE: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `max_ij |a_ij - b_ij|`.
pub fn max_abs_diff(a: &DenseOperator, b: &DenseOperator) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Kronecker product `a ⊗ b`, first factor most significant.
pub fn kron(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    a.kronecker(b)
}

pub fn is_unitary(u: &DenseOperator, tol: f64) -> bool {
    u.is_square()
        && max_abs_diff(
            &(u.adjoint() * u),
            &DenseOperator::identity(u.nrows(), u.nrows()),
        ) <= tol
}

pub(crate) fn ensure_finite(a: &DenseOperator) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Argument("operator has non-finite entries".into()))
    }
}

/// `sum_ij conj(a_ij) b_ij = Tr(a† b)`.
pub(crate) fn hs_inner(a: &DenseOperator, b: &DenseOperator) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}
