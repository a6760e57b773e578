use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Vectors, operators or subspaces whose shapes or moduli do not match.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An argument outside the domain of the operation.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A channel or distribution failed validation. `deviation` is the
    /// offending max-norm residual (e.g. `‖ΣA†A − I‖_max`).
    #[error("validation failed: {message} (deviation {deviation:.3e})")]
    Validation { message: String, deviation: f64 },

    /// A Choi matrix with an eigenvalue below the positivity tolerance.
    #[error("map is not completely positive: minimum Choi eigenvalue {min_eigenvalue:.3e}")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    /// An exhaustive enumeration or dense simulation would exceed its cap.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    /// A property that must hold by construction failed.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// The primal and tilted exponent solvers disagree.
    #[error("exponent solvers disagree: primal {primal:.12}, tilted {tilted:.12}")]
    SolverInconsistency { primal: f64, tilted: f64 },

    #[error("unsupported dimension d = {0}; only d = 2 is supported here")]
    UnsupportedDimension(u32),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
