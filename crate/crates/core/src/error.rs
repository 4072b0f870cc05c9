use thiserror::Error;

/// Errors produced by the recovery library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate measurements: A^T y is identically zero")]
    DegenerateMeasurements,

    #[error("degenerate pivot: |y^T A_{j0}| = {pivot:e} is below threshold {threshold:e} (j0 = {j0})")]
    DegeneratePivot { j0: usize, pivot: f64, threshold: f64 },

    #[error("non-finite value in {what} at iteration {iteration}")]
    Numeric { what: &'static str, iteration: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric { .. } | Error::DegenerateMeasurements | Error::DegeneratePivot { .. } => 3,
            _ => 2,
        }
    }
}
