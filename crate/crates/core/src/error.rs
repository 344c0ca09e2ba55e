use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse failure class, used by the command line front-end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Io,
    Data,
    Contract,
}

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data is malformed or inconsistent.
    #[error("data error: {0}")]
    Data(String),

    /// A caller broke an operation's precondition (unpatched matrix, short trace, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("format mismatch: {rejected} of {total} rows rejected (check the column mapping)")]
    FormatMismatch { rejected: usize, total: usize },

    #[error("insufficient collisions: no node appeared in more than one sample; increase the sample size or sample count")]
    InsufficientCollisions,

    #[error("insufficient {class} pairs: need {needed}, only {available} eligible")]
    InsufficientPairs {
        class: &'static str,
        needed: usize,
        available: usize,
    },

    #[error("unknown user `{0}`")]
    UnknownUser(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Stream(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. } | Error::Stream(_) => ErrorClass::Io,
            Error::Config(_) => ErrorClass::Usage,
            Error::Contract(_) => ErrorClass::Contract,
            Error::Domain(_)
            | Error::Data(_)
            | Error::FormatMismatch { .. }
            | Error::InsufficientCollisions
            | Error::InsufficientPairs { .. }
            | Error::UnknownUser(_)
            | Error::Json(_) => ErrorClass::Data,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        if err.is_io_error() {
            match err.into_kind() {
                csv::ErrorKind::Io(e) => Error::Stream(e),
                _ => unreachable!(),
            }
        } else {
            Error::Data(err.to_string())
        }
    }
}
