use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Data {
        path: PathBuf,
        source: textkernel_core::Error,
    },
    #[error(transparent)]
    Core(#[from] textkernel_core::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn data(path: impl Into<PathBuf>, source: textkernel_core::Error) -> Self {
        Self::Data {
            path: path.into(),
            source,
        }
    }

    /// 0 success, 1 failed check, 2 usage / input / I/O, 3 data format.
    pub fn exit_code(&self) -> u8 {
        let core = |e: &textkernel_core::Error| match e {
            textkernel_core::Error::Io(_) => 2,
            _ => 3,
        };
        match self {
            Self::Usage(_) | Self::Io { .. } => 2,
            Self::Data { source, .. } => core(source),
            Self::Core(e) => core(e),
            Self::Failed(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
