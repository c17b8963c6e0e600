//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

use crate::loss::PhiKind;

/// Errors produced by dataset handling, training, and model io.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file failed to parse; `line` is 1-based.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0:?} loss is not differentiable everywhere; training requires a smooth loss")]
    NonSmoothPhi(PhiKind),

    #[error("solver diverged: {0}")]
    Divergence(String),

    #[error("model file rejected: {0}")]
    ModelFormat(String),

    #[error("every regularization candidate failed to fit: {0}")]
    AllCandidatesFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
