use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNoConvergence { sweeps: usize, off_norm: f64 },
    #[error("empty support")]
    EmptySupport,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero generating vector")]
    ZeroVector,
    #[error("vector is not violated (vᵀX̃v = {0:e})")]
    NotViolated(f64),
    #[error("LP solve failed: {0}")]
    Lp(#[from] crate::lp::LpError),
    #[error("undefined gap: initial bound equals optimum")]
    ZeroGap,
    #[error("instance sets differ: {0}")]
    InstanceMismatch(String),
    #[error("no instances supplied")]
    NoInstances,
    #[error("{0}")]
    Unsupported(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
