use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("no convergence after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate quadrature at boundary point {point:?}: {reason}")]
    DegenerateQuadrature { point: Vec<f64>, reason: String },

    #[error("solver failed at node {node}: {source}")]
    NodeSolve {
        node: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("matrix is not positive definite (pivot {pivot} = {value:.3e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
