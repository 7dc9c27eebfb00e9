use thiserror::Error;

/// Errors raised by the numerical and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A tuning parameter (tolerance, grid, count) is out of range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// The requested series or integral diverges.
    #[error("divergence: {0}")]
    Divergence(String),
    /// The requested evaluation mode cannot serve these parameters.
    #[error("mode error: {0}")]
    Mode(String),
    /// The configuration cannot be realized in floating point.
    #[error("capability error: {0}")]
    Capability(String),
    /// Too few observations to form a stable estimate.
    #[error("insufficient data at n = {n}: {reason}")]
    InsufficientData { n: u64, reason: String },
    /// An iterative method failed to converge.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("cancelled")]
    Cancelled,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn parameter(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
