use std::path::PathBuf;

use thiserror::Error;

/// Errors of the experiment runner. Each maps to a process exit code.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("plot data: {0}")]
    Plot(String),

    #[error("{context}: {source}")]
    Numeric { context: String, source: korn_core::Error },
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Config { path: path.into(), message: message.into() }
    }

    /// `2` for usage, configuration and file-system errors, `3` for numeric
    /// failures inside the algorithms.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Numeric { .. } => 3,
            _ => 2,
        }
    }
}

/// Attaches a context string to core errors.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T>;
}

impl<T> Context<T> for korn_core::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|source| LabError::Numeric { context: what(), source })
    }
}
