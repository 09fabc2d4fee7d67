use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Wav { path: PathBuf, message: String },

    #[error("unsupported audio encoding: {0}")]
    UnsupportedEncoding(String),

    #[error("audio contains no samples")]
    EmptyAudio,

    #[error("invalid audio: {0}")]
    InvalidAudio(String),

    #[error("annotation line {line}: {message}")]
    Annotation { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("input is not even-symmetric (residue {residue:e} exceeds tolerance {tolerance:e})")]
    NotSymmetric { residue: f64, tolerance: f64 },

    #[error("frame count mismatch: prediction has {pred} frames, ground truth has {truth}")]
    FrameMismatch { pred: usize, truth: usize },

    #[error("signal is silent; SNR is undefined")]
    SilentSignal,

    #[error("malformed piano roll: {0}")]
    Roll(String),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}
