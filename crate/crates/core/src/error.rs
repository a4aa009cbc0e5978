use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("matrix is not hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("not an operator system: {0}")]
    NotOperatorSystem(String),

    #[error("instance too large for exact solver: {what} (n = {n}, limit {limit})")]
    TooLarge { what: &'static str, n: usize, limit: usize },

    #[error("matrix is not doubly stochastic (residual {residual:.3e})")]
    NotDoublyStochastic { residual: f64 },

    #[error("projection check failed: {0}")]
    WrongProjectionClass(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(expected: impl Into<String>, found: impl Into<String>) -> Self {
        Error::ShapeMismatch { expected: expected.into(), found: found.into() }
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
