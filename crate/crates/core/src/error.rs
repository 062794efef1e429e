use thiserror::Error;

/// Errors shared by every solver in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain too small: {0}")]
    DomainTooSmall(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("solver failure in {what} (residual {residual:e})")]
    SolverFailure { what: String, residual: f64 },
    #[error("invalid regime: {0}")]
    InvalidRegime(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn failure(what: impl Into<String>, residual: f64) -> Error {
    Error::SolverFailure {
        what: what.into(),
        residual,
    }
}
