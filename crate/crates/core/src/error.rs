use thiserror::Error;

/// Errors raised by the fractional operators, quadrature and inequality harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The result does not fit in the f64 range.
    #[error("overflow: {0}")]
    Overflow(String),
    /// An integrand or function evaluation produced a non-finite value.
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    /// A theorem's hypotheses are not met by the supplied functions or setup.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    /// Malformed function specification text.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
