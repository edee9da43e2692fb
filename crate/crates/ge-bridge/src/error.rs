use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Covariance factorization failed even after diagonal jitter retries.
    #[error("covariance factorization failed (diagonal jitter tried up to {max_jitter:.1e})")]
    Factorization { max_jitter: f64 },
    /// Two run-length distributions with different supports were compared.
    #[error("run-length supports differ: k_max {left} vs {right}")]
    SupportMismatch { left: usize, right: usize },
    /// Malformed trace file (bad magic, stray characters, truncation).
    #[error("trace format: {0}")]
    TraceFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
