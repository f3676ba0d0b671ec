use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed input: {0}")]
    Format(String),
    #[error("not a UBSS container (bad magic)")]
    BadMagic,
    #[error("unsupported container version {0}")]
    Version(u8),
    #[error("container size mismatch: expected {expected} bytes, found {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("config: {0}")]
    Config(String),
    #[error("external command failed: {0}")]
    External(String),
    #[error(transparent)]
    Core(#[from] ubssvc_core::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
