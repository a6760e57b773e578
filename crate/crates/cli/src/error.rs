use std::fmt;

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, grids or input files: exit 2.
    Usage(String),
    /// A library error, classified by kind.
    Core(qexp::Error),
    Io(std::io::Error),
    /// A verification battery reported failures: exit 1.
    Failed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use qexp::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Failed(_) => 1,
            CliError::Core(e) => match e {
                E::InvariantViolation(_) | E::SolverInconsistency { .. } => 1,
                E::Resource(_) => 3,
                _ => 2,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Failed(n) => write!(f, "{n} invariant(s) failed"),
        }
    }
}

impl From<qexp::Error> for CliError {
    fn from(e: qexp::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
