use std::path::{Path, PathBuf};
use std::process::ExitCode;

use symdis_core::Error;
use thiserror::Error;

/// Process exit statuses, one per error class. Clap exits with 2 on bad
/// arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Usage = 2,
    Config = 3,
    InvalidInput = 4,
    Infeasible = 5,
    AuditFailed = 6,
    Io = 7,
    Internal = 8,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s as u8)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("audit failed: {0}")]
    Audit(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn status(&self) -> Status {
        match self {
            Self::Config(_) => Status::Config,
            Self::Io { .. } => Status::Io,
            Self::Audit(_) => Status::AuditFailed,
            Self::Core(e) => core_status(e),
        }
    }
}

fn core_status(e: &Error) -> Status {
    match e {
        Error::InvalidSchema(_)
        | Error::InvalidDimension(_)
        | Error::InvalidSigma(_)
        | Error::InvalidMode(_)
        | Error::UnknownFactor(_)
        | Error::TopKOutOfRange { .. } => Status::Config,
        Error::ValueOutOfRange { .. }
        | Error::ArityMismatch { .. }
        | Error::InvalidDataset { .. }
        | Error::ImageSize { .. }
        | Error::MalformedImage(_)
        | Error::MalformedMemory(_)
        | Error::MalformedProjection { .. }
        | Error::Json(_) => Status::InvalidInput,
        Error::InsufficientPairs { .. } => Status::Infeasible,
        Error::Io(_) => Status::Io,
        Error::Probe { source, .. } => core_status(source),
        _ => Status::Internal,
    }
}
