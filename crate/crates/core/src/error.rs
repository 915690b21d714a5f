use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("degenerate seed: all-zero LFSR state produces the constant zero stream")]
    DegenerateSeed,

    #[error("period mismatch: expected {expected}, observed {observed}")]
    PeriodMismatch { expected: usize, observed: usize },

    #[error("not an m-sequence: {0}")]
    NotMSequence(String),

    #[error("eigensolver did not converge for eigenvalue {index} (matrix hash {hash})")]
    NoConvergence { index: usize, hash: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }
}
