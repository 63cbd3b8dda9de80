use thiserror::Error;

use crate::specfun::QuadratureResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("{what} did not converge after {iterations} terms")]
    NonConvergence { what: &'static str, iterations: usize },

    /// Subdivision limit reached; `best` holds the estimate at that point.
    #[error(
        "adaptive quadrature hit the subdivision limit (estimate {}, error {:e})",
        best.value,
        best.abs_error_estimate
    )]
    QuadratureFailed { best: QuadratureResult },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("grid does not match the solution domain: {0}")]
    GridMismatch(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("positivity violated at cell {cell}: value {value:e}")]
    Positivity { cell: usize, value: f64 },

    #[error("step rejected: {0}")]
    StepRejected(String),

    #[error("ensemble is empty")]
    EmptyEnsemble,
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }
}
