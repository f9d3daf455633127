//! Shared error type for the library.

use std::fmt;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes surfaced by the library.
#[derive(Debug)]
pub enum Error {
    /// Malformed input data: non-finite entries, empty matrices, bad sizes.
    InvalidInput(String),
    /// A bracket is degenerate or does not enclose a sign change.
    Bracket(String),
    /// An argument lies outside the domain of the function being evaluated.
    Domain(String),
    /// A documented precondition of the operation does not hold.
    Precondition(String),
    /// An internal identity failed beyond round-off; indicates a defect.
    InternalConsistency(String),
    /// A scripted reproduction did not match its recorded outcome.
    ReproductionFailed(String),
    /// A spectrum description or table file could not be parsed or validated.
    SpecFormat(String),
    /// Underlying I/O failure.
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Bracket(msg) => write!(f, "bracket error: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::InternalConsistency(msg) => write!(f, "internal consistency failure: {msg}"),
            Error::ReproductionFailed(msg) => write!(f, "reproduction failed: {msg}"),
            Error::SpecFormat(msg) => write!(f, "spectrum spec error: {msg}"),
            Error::Io(err) => write!(f, "i/o error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}
