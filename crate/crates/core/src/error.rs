use thiserror::Error;

/// Errors raised anywhere in the sampler, summaries, metrics, or I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not numerically positive definite")]
    NotPositiveDefinite,

    #[error("sampler aborted after {retries} consecutive positive-definiteness failures at iteration {iteration}")]
    ChainAborted { iteration: usize, retries: usize },

    #[error("insufficient draws: need at least {needed}, have {have}")]
    InsufficientDraws { needed: usize, have: usize },

    #[error("rate undefined: {0}")]
    UndefinedRate(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at {path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("zero-variance column {0}")]
    ZeroVariance(usize),

    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
