use thiserror::Error;

use crate::solvers::lp::LpError;
use crate::solvers::sdp::SdpError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("enumeration too large: {0}")]
    Overflow(String),

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error(transparent)]
    Sdp(#[from] SdpError),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    /// True for failures of the numerical back ends rather than of the input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, Error::Lp(_) | Error::Sdp(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
