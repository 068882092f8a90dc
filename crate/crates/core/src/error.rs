use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Malformed state data (wrong shape, asymmetric or non-positive covariance).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Well-formed state data that violates `γ + iJ ⪰ 0`.
    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("invalid transform: {0}")]
    InvalidTransform(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::Error::$variant(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
