use std::path::Path;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("invalid value for --{flag}: {reason}")]
    Validation { flag: String, reason: String },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Core(#[from] framethresh::Error),
}

/// Stable process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Usage,
    Validation,
    Io,
    Parse,
    Numerical,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 2,
            ErrorKind::Validation => 3,
            ErrorKind::Io => 4,
            ErrorKind::Parse => 5,
            ErrorKind::Numerical => 6,
        }
    }
}

impl CliError {
    pub fn validation(flag: &str, reason: impl Into<String>) -> Self {
        CliError::Validation {
            flag: flag.to_string(),
            reason: reason.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn parse(path: &Path, message: impl ToString) -> Self {
        CliError::Parse {
            path: path.display().to_string(),
            message: message.to_string(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        use framethresh::Error as E;
        match self {
            CliError::Usage(_) => ErrorKind::Usage,
            CliError::Validation { .. } => ErrorKind::Validation,
            CliError::Io { .. } | CliError::Core(E::Io { .. }) => ErrorKind::Io,
            CliError::Parse { .. } | CliError::Core(E::Parse(_)) => ErrorKind::Parse,
            CliError::Core(E::NotConverged { .. }) => ErrorKind::Numerical,
            CliError::Core(_) => ErrorKind::Validation,
        }
    }

    /// The offending flag or parameter, when known.
    pub fn parameter(&self) -> Option<String> {
        match self {
            CliError::Validation { flag, .. } => Some(flag.clone()),
            CliError::Core(framethresh::Error::InvalidParameter { name, .. }) => {
                Some(name.to_string())
            }
            _ => None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub kind: ErrorKind,
    pub code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
    pub message: String,
}

impl From<&CliError> for ErrorReport {
    fn from(e: &CliError) -> Self {
        let kind = e.kind();
        ErrorReport {
            kind,
            code: kind.exit_code(),
            parameter: e.parameter(),
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
