//! Exact dense simulation of small symplectic codes: code spaces, the
//! Knill–Laflamme recovery, fidelity functionals and the bounds relating
//! them.

mod bounds;
mod code;
mod fidelity;
mod recovery;

pub use bounds::{
    enlarge_correctable_set, ensemble_check, extract_subcode, preskill_lower_bound, CodeFidelities,
    EnsembleReport, Subcode, Verdict,
};
pub use code::{build_codes, StabilizerCode, StabilizerFile};
pub use fidelity::{
    fidelity_report, state_fidelity, FidelityModel, FidelityReport, MinAvgFidelity, MinFidelity,
    SearchOptions,
};
pub use recovery::{build_recovery, RecoveryMap};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::channel::{c, DenseOperator};
use crate::error::{Error, Result};
use crate::gfsym::checked_pow;

/// Largest Hilbert-space dimension simulated densely.
pub const DENSE_CAP: u64 = 64;

pub(crate) fn dense_dim(d: u32, n: usize) -> Result<usize> {
    checked_pow(d, n)
        .filter(|&x| x <= DENSE_CAP)
        .map(|x| x as usize)
        .ok_or_else(|| {
            Error::Resource(format!(
                "d^n = {d}^{n} exceeds the dense simulation cap of {DENSE_CAP}; use fewer qudits"
            ))
        })
}

/// Orthonormal basis of the column space of `a` by twice-applied modified
/// Gram–Schmidt; columns whose residual falls below `tol` are skipped.
pub(crate) fn orthonormal_columns(a: &DenseOperator, tol: f64) -> DenseOperator {
    let mut kept: Vec<DVector<Complex64>> = Vec::new();
    for j in 0..a.ncols() {
        let mut v = a.column(j).into_owned();
        for _ in 0..2 {
            for q in &kept {
                let overlap = q.dotc(&v);
                v -= q * overlap;
            }
        }
        let norm = v.norm();
        if norm > tol {
            kept.push(v / c(norm, 0.0));
        }
    }
    let mut out = DenseOperator::zeros(a.nrows(), kept.len());
    for (j, q) in kept.iter().enumerate() {
        out.set_column(j, q);
    }
    out
}
