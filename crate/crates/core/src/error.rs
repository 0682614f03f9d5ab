use thiserror::Error;

/// Failures reported by the construction and certification routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition failed in {op}: {detail}")]
    Precondition { op: &'static str, detail: String },

    #[error("hypothesis ({which}) failed: {detail}")]
    Hypothesis { which: &'static str, detail: String },

    #[error("level {level} is at or above the critical threshold {threshold}")]
    AboveThreshold { level: f64, threshold: f64 },

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn precondition(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Precondition {
        op,
        detail: detail.into(),
    }
}
