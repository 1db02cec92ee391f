use alloc::string::String;
use core::fmt;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A physical input was outside its allowed domain.
    InvalidInput { field: &'static str, reason: String },
    /// Atom parameters failed validation; `path` names the offending field.
    InvalidModel { path: String, reason: String },
    /// A half-integer quantum number was malformed (bad parity or |m| > j).
    MalformedQuantumNumber { reason: String },
    /// Matrix element evaluated on an undamped intermediate resonance.
    Pole { level: String, delta: f64 },
    /// A requested spectrum range contains an undamped pole.
    PoleInRange { level: String },
    /// A closed-form expression has a vanishing denominator.
    DegenerateFormula { channel: &'static str, reason: &'static str },
    /// The operation needs a model shape that this atom does not have.
    Unsupported { reason: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput { field, reason } => write!(f, "invalid `{field}`: {reason}"),
            Error::InvalidModel { path, reason } => write!(f, "invalid atom model at `{path}`: {reason}"),
            Error::MalformedQuantumNumber { reason } => write!(f, "malformed quantum number: {reason}"),
            Error::Pole { level, delta } => {
                write!(f, "undamped pole of level {level} at delta = {delta:e} rad/s")
            }
            Error::PoleInRange { level } => {
                write!(f, "range contains the undamped pole of level {level}")
            }
            Error::DegenerateFormula { channel, reason } => {
                write!(f, "closed form for {channel} is degenerate: {reason}")
            }
            Error::Unsupported { reason } => write!(f, "unsupported: {reason}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: &str) -> Error {
    Error::InvalidInput { field, reason: reason.into() }
}

impl core::error::Error for Error {}
