use thiserror::Error;

/// Errors produced by the signature toolkit.
///
/// Each variant corresponds to a class of failure that callers (and the CLI
/// exit-status mapping) treat differently.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("insecure parameters: {0}")]
    InsecureParameters(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("degenerate bound: {0}")]
    Degenerate(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("sweep error: {0}")]
    Sweep(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
