use thiserror::Error;

/// Errors raised by the compression, sparsification and encoding routines.
#[derive(Debug, Error)]
pub enum HbsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("kernel evaluated at coincident points {i} and {j}")]
    SingularEvaluation { i: usize, j: usize },

    #[error("matrix is singular (pivot {pivot})")]
    Singular { pivot: usize },

    #[error("dimension {n} exceeds the dense guard of {limit}")]
    DimensionGuard { n: usize, limit: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HbsError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(HbsError::InvalidInput(msg.into()))
}
