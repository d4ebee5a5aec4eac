use thiserror::Error;

use crate::decompose::CheckReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("argument {value} outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    /// A random-size minimum was asked of a count law that can be zero, or a
    /// shift factorization of a law without positive support.
    #[error("support error: {0}")]
    Support(String),

    #[error("no exact mixture sampler for {0}")]
    UnsupportedMixer(String),

    #[error("root solver failed: {0}")]
    Solver(String),

    #[error("empty sample")]
    EmptySample,

    /// A required factor failed its validity checks.
    #[error("{} failed validation (sup residual {:.3e} at x = {})", .0.check, .0.sup_residual, .0.worst_x)]
    CheckFailed(Box<CheckReport>),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason: reason.into(),
        }
    }
}
