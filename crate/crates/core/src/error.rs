use thiserror::Error;

pub type Result<V> = std::result::Result<V, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("problem size {size} exceeds cap {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    #[error("rank deficient span: {0}")]
    RankDeficient(String),

    #[error("malformed domain literal `{literal}`: {reason}")]
    Parse { literal: String, reason: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of an iterative or adaptive numerical procedure,
    /// as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence(_) | Error::RankDeficient(_))
    }
}
