use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (empty clouds, bad parameters, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("size mismatch: {0} vs {1} points")]
    SizeMismatch(usize, usize),

    #[error("exact EMD supports at most {cap} points (got {got}); use emd_approx")]
    ExactEmdTooLarge { cap: usize, got: usize },

    /// A nearest-neighbor assignment is not unique where a closed form needs it to be.
    #[error("ambiguous assignment: {0}")]
    Ambiguous(String),

    #[error("optimization diverged at step {step}: {reason}")]
    Diverged { step: usize, reason: String },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures of the numerical procedures themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Ambiguous(_) | Error::Diverged { .. } | Error::Construction(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
