//! Crate-wide error type.

use std::fmt;

/// Errors produced by samplers, spectral estimators and simulators.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Parameters violate a constructor or operation contract.
    InvalidParameter(String),
    /// An input value lies outside the mathematical domain of an operation.
    Domain(String),
    /// A quadrature routine could not certify the requested accuracy.
    QuadratureFailure(String),
    /// An internal series or continued fraction did not converge to target.
    AccuracyNotMet(String),
    /// An asymptotic formula was requested outside its validity condition.
    ConditionViolated(String),
    /// Operation requires a nonempty event trace.
    EmptyTrace,
    /// Operation requires at least two events.
    TooFewEvents,
    /// Spectrum estimates are not on the same frequency grid.
    GridMismatch,
    /// Not enough usable points in the requested band.
    InsufficientPoints(String),
    /// A configured resource cap (e.g. packet count) was exceeded.
    ResourceLimit(String),
    /// A text input could not be parsed; `line` is 1-based.
    Parse { line: usize, message: String },
    /// Underlying I/O failure.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::QuadratureFailure(msg) => write!(f, "quadrature failure: {msg}"),
            Error::AccuracyNotMet(msg) => write!(f, "accuracy not met: {msg}"),
            Error::ConditionViolated(msg) => write!(f, "condition violated: {msg}"),
            Error::EmptyTrace => write!(f, "empty trace"),
            Error::TooFewEvents => write!(f, "trace has too few events"),
            Error::GridMismatch => write!(f, "frequency grids do not match"),
            Error::InsufficientPoints(msg) => write!(f, "insufficient points: {msg}"),
            Error::ResourceLimit(msg) => write!(f, "resource limit exceeded: {msg}"),
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
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
