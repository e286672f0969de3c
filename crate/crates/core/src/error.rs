use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain where the routine is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A Gamma-function pole (or a Mellin-kernel pole) was hit exactly.
    #[error("pole at {at}: {what}")]
    Pole { what: String, at: f64 },

    /// A series, iteration or quadrature failed to reach the requested accuracy.
    #[error("no convergence in {routine}: {detail}")]
    NonConvergence { routine: String, detail: String },

    /// The requested option combination is not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A vector of shape parameters is not a member of the requested index set.
    #[error("membership error: {0}")]
    Membership(String),

    /// The empirical moment does not stabilise under sample doubling.
    #[error("moment appears infinite: {0}")]
    InfiniteMoment(String),

    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn nonconv(routine: &str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            routine: routine.to_string(),
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
