use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// `line` is 1-based; 0 means the problem is not tied to one line.
    #[error("{source_name}:{line}: {message}")]
    Parse { source_name: String, line: usize, message: String },
    #[error(transparent)]
    Model(#[from] flipnet_core::Error),
}

pub type Result<T> = std::result::Result<T, IoError>;

pub(crate) fn parse_error(source_name: &str, line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse { source_name: source_name.to_string(), line, message: message.into() }
}
