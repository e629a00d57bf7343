use thiserror::Error;

/// Failure modes shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation
    /// (negative eigenvalue, non-symmetric matrix, singular covariance, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A hypothesis of a bound formula is not satisfied by the input.
    #[error("condition violated: {0}")]
    Condition(String),
    /// A quadrature, root search or refinement loop did not reach its target.
    #[error("numerical failure: {message} (achieved error estimate {err_est:e})")]
    Numerical { message: String, err_est: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn condition(msg: impl Into<String>) -> Self {
        Error::Condition(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, err_est: f64) -> Self {
        Error::Numerical {
            message: msg.into(),
            err_est,
        }
    }

    /// Short machine-readable tag, used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::Condition(_) => "ConditionError",
            Error::Numerical { .. } => "NumericalError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
