use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the processor model.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("io error: {0}")]
    Stream(#[from] io::Error),

    #[error("malformed dataset {path}: {reason}")]
    Dataset { path: PathBuf, reason: String },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error("malformed AER packet: {0}")]
    Packet(String),

    #[error("protocol violation: timestamp {got} arrived after {current}")]
    DecreasingTimestamp { current: u32, got: u32 },

    #[error("output FIFO overflow at timestamp {timestamp} (capacity {capacity})")]
    OutputOverflow { timestamp: u32, capacity: usize },

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn dataset(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Dataset {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line harness.
    ///
    /// 1 = configuration/validation, 2 = IO, 3 = runtime protocol.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Checkpoint(_) | Error::Encoding(_) | Error::Evaluation(_) => {
                1
            }
            Error::Io { .. } | Error::Stream(_) | Error::Dataset { .. } => 2,
            Error::Packet(_) | Error::DecreasingTimestamp { .. } | Error::OutputOverflow { .. } => {
                3
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
