use std::process::ExitCode;

use thiserror::Error;

/// Command failure, classified by exit status.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Internal(_) => 3,
        })
    }
}

impl From<gcos::Error> for Failure {
    fn from(e: gcos::Error) -> Self {
        use gcos::Error as E;
        let message = e.to_string();
        match e {
            E::InvalidParameter(_) | E::Config(_) => Failure::Usage(message),
            E::SizeMismatch { .. } | E::NotSymmetric { .. } => Failure::Internal(message),
            _ => Failure::Data(message),
        }
    }
}
