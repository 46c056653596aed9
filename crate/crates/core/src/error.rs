use std::path::PathBuf;

use thiserror::Error;

use crate::lacunary::ParamViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("segment [{lo}, {hi}) spans {len} integers, limit is {limit}")]
    SegmentTooLarge {
        lo: u64,
        hi: u64,
        len: u64,
        limit: u64,
    },

    #[error("invalid lacunary parameters: {0}")]
    Params(#[from] ParamViolation),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for caller mistakes, 1 for failures while computing or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_)
            | Error::SegmentTooLarge { .. }
            | Error::Params(_)
            | Error::Usage(_) => 2,
            Error::Overflow(_) | Error::Io { .. } | Error::Json(_) => 1,
        }
    }
}
