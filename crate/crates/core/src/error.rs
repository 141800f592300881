use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("infeasible problem")]
    Infeasible,
    #[error("unbounded problem")]
    Unbounded,
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    #[error("search budget exhausted: {0}")]
    Budget(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
