//! Library-wide error type.

use std::fmt;

/// Errors raised by estimator construction and numeric routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied argument violates a precondition.
    InvalidInput(String),
    /// A numeric routine failed to reach its accuracy target. Carries the
    /// best value obtained so far where one exists.
    Numeric { message: String, best: Option<f64> },
    /// A linear system that should be regular turned out singular.
    Singular(String),
    /// An I/O or serialization failure (experiment harness, estimate files).
    Io(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric {
            message: msg.into(),
            best: None,
        }
    }

    pub fn numeric_with_best(msg: impl Into<String>, best: f64) -> Self {
        Error::Numeric {
            message: msg.into(),
            best: Some(best),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Numeric { message, best } => match best {
                Some(b) => write!(f, "numeric failure: {message} (best estimate {b})"),
                None => write!(f, "numeric failure: {message}"),
            },
            Error::Singular(m) => write!(f, "singular system: {m}"),
            Error::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
