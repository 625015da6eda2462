use std::path::PathBuf;

use dimabsa_core::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {msg}", path.display())]
    Syntax { path: PathBuf, line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] dimabsa_core::Error),
    #[error("record {id:?}: {source}")]
    InRecord { id: String, source: dimabsa_core::Error },
    #[error("{} violation(s) found", .0.len())]
    Invalid(Vec<Violation>),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
}

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const INVALID: u8 = 2;
    pub const INTERNAL: u8 = 3;
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        use dimabsa_core::Error as C;
        match self {
            Error::Usage(_) | Error::Core(C::InvalidBinWidth(_) | C::MissingScheme) => exit::USAGE,
            Error::Syntax { .. } | Error::Core(_) | Error::InRecord { .. } | Error::Invalid(_) => exit::INVALID,
            Error::Io { .. } | Error::Internal(_) => exit::INTERNAL,
        }
    }

    /// Violations carried by the error, if any.
    pub fn violations(&self) -> &[Violation] {
        match self {
            Error::Invalid(v) => v,
            _ => &[],
        }
    }
}
