use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed or unsupported file contents.
    #[error("format error{}: {message}", .offset.map(|o| format!(" at byte offset {o}")).unwrap_or_default())]
    Format {
        offset: Option<u64>,
        message: String,
    },

    /// Input violates a documented precondition or type invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("no ground found: {0}")]
    NoGround(String),

    #[error("unknown strategy `{name}` for {family}; available: {available}")]
    UnknownStrategy {
        family: &'static str,
        name: String,
        available: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(message: impl Into<String>) -> Self {
        Error::Format {
            offset: None,
            message: message.into(),
        }
    }

    pub(crate) fn format_at(offset: u64, message: impl Into<String>) -> Self {
        Error::Format {
            offset: Some(offset),
            message: message.into(),
        }
    }

    pub(crate) fn validation(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }

    /// True for errors caused by unreadable or malformed inputs, as opposed to
    /// inputs that parse but break a contract.
    pub fn is_format(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Format { .. })
    }
}
