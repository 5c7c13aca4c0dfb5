use thiserror::Error;

/// Errors raised by the numerical kernels and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value {value} at quadrature node {node}")]
    NonFinite { node: f64, value: f64 },

    #[error("source is singular at t = 0 (exponent {mu})")]
    SingularAtZero { mu: f64 },

    #[error("Mittag-Leffler argument {z} outside the series domain |z| <= {limit}")]
    OutOfDomain { z: f64, limit: f64 },

    #[error(
        "Mittag-Leffler series at z = {z} is ill-conditioned (cancellation factor {factor:.1e})"
    )]
    IllConditioned { z: f64, factor: f64 },

    #[error("series did not converge within {terms} terms")]
    NotConverged { terms: usize },

    #[error("singular linear system (zero pivot in column {column})")]
    SingularSystem { column: usize },

    #[error("{scheme} cannot integrate a source term with exponent {mu}; use {minimal} or higher")]
    IncompatibleScheme {
        scheme: String,
        mu: f64,
        minimal: String,
    },

    #[error("{scheme} produced a non-finite solution with N = {steps}")]
    Diverged { scheme: String, steps: usize },

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
