use thiserror::Error;

/// Errors raised by the numerical kernels, samplers and statistics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge with {nodes} nodes (achieved error {achieved:e})")]
    Quadrature { nodes: usize, achieved: f64 },

    #[error("continued fraction did not converge after {iterations} iterations")]
    ContinuedFraction { iterations: usize },

    #[error("series truncated at hard cap m = {order} with tail estimate {tail:e}")]
    Truncation { order: usize, tail: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    Eigensolver { sweeps: usize },

    #[error("malformed graph data: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
