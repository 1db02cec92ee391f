use std::fmt;
use std::path::PathBuf;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const MISMATCH: u8 = 1;
    pub const INVALID_INPUT: u8 = 2;
    pub const IO: u8 = 3;
    pub const UNSATISFIABLE: u8 = 4;
}

#[derive(Debug)]
pub enum Error {
    Core(tpa_core::Error),
    /// Atom file that could not be parsed.
    AtomFile { path: PathBuf, reason: String },
    Io { path: PathBuf, source: std::io::Error },
    Csv { path: PathBuf, source: csv::Error },
    /// A well-formed request with no answer, e.g. no null to default to.
    Unsatisfiable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn exit_code(&self) -> u8 {
        use tpa_core::Error as C;
        match self {
            Error::Core(C::InvalidInput { .. } | C::InvalidModel { .. } | C::MalformedQuantumNumber { .. }) => {
                exit::INVALID_INPUT
            }
            Error::Core(_) | Error::Unsatisfiable(_) => exit::UNSATISFIABLE,
            Error::AtomFile { .. } => exit::INVALID_INPUT,
            Error::Io { .. } | Error::Csv { .. } => exit::IO,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Core(e) => write!(f, "{e}"),
            Error::AtomFile { path, reason } => write!(f, "atom file {}: {reason}", path.display()),
            Error::Io { path, source } => write!(f, "{}: {source}", path.display()),
            Error::Csv { path, source } => write!(f, "{}: {source}", path.display()),
            Error::Unsatisfiable(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Core(e) => Some(e),
            Error::Io { source, .. } => Some(source),
            Error::Csv { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<tpa_core::Error> for Error {
    fn from(e: tpa_core::Error) -> Self {
        Error::Core(e)
    }
}
