use alloc::string::String;

/// Errors raised by the numerical core. Each variant maps to a stable
/// machine-readable tag via [`Error::tag`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("alpha must lie in (0, 2], got {0}")]
    AlphaRange(f64),
    #[error("beta must lie in (0, 1), got {0}")]
    BetaRange(f64),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("time {t} outside [0, {horizon}]")]
    TimeRange { t: f64, horizon: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("unsupported decomposition: {0}")]
    UnsupportedDecomposition(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("adaptedness violation: jump {at} read innovation {read}")]
    Adaptedness { at: usize, read: usize },
}

impl Error {
    pub fn tag(&self) -> &'static str {
        match self {
            Error::AlphaRange(_) => "PARAM_ALPHA_RANGE",
            Error::BetaRange(_) => "PARAM_BETA_RANGE",
            Error::Param(_) => "PARAM_INVALID",
            Error::TimeRange { .. } => "RANGE_TIME",
            Error::Shape(_) => "SHAPE_MISMATCH",
            Error::Data(_) => "DATA_INVALID",
            Error::UnsupportedDecomposition(_) => "UNSUPPORTED_DECOMPOSITION",
            Error::Precondition(_) => "PRECONDITION",
            Error::Adaptedness { .. } => "ADAPTEDNESS_VIOLATION",
        }
    }

    /// True for errors caused by invalid input parameters (as opposed to
    /// data or runtime failures).
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::AlphaRange(_) | Error::BetaRange(_) | Error::Param(_) | Error::Precondition(_))
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Param(msg.into())
}
