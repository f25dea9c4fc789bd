use std::path::PathBuf;

use clusterlife_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("invalid value at `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error(transparent)]
    Model(#[from] CoreError),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
}

pub type Result<T> = std::result::Result<T, AppError>;

impl AppError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        AppError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit status: 2 for bad input, 3 for size guards, 4 for
    /// numeric failures, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Read { .. } | AppError::Parse { .. } | AppError::Validation { .. } => 2,
            AppError::Model(e) => match e {
                CoreError::TooLarge { .. } => 3,
                CoreError::Numeric(_)
                | CoreError::InfeasibleEnergy { .. }
                | CoreError::UnboundedLifetime => 4,
                _ => 2,
            },
            AppError::Write { .. } | AppError::Csv(_) | AppError::Threads(_) => 1,
        }
    }
}
