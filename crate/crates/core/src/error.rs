use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by estimators, mechanisms and the experiment harness.
#[derive(Debug, Error)]
pub enum AuditError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown mechanism `{0}`")]
    UnknownMechanism(String),

    #[error("mechanism sampling failed: {0}")]
    Sampling(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AuditError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        AuditError::InvalidArgument(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        AuditError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by the user's configuration rather than by a run.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            AuditError::Config { .. } | AuditError::Parse { .. } | AuditError::UnknownMechanism(_)
        )
    }
}

pub type Result<T, E = AuditError> = std::result::Result<T, E>;
