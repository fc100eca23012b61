use thiserror::Error;

/// Errors raised by graph sampling, code construction, decoding and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("sampling failed after {attempts} attempts")]
    SamplingFailure { attempts: usize },
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("unsupported noise model: {0}")]
    UnsupportedModel(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
