use std::path::PathBuf;

use edtherm_core::Error as CoreError;

/// Process exit codes of the `edtherm` binary.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL_GUARD: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) | AppError::Read { .. } | AppError::Parse { .. } => exit_code::CONFIG,
            AppError::Core(e) => match e {
                CoreError::DenseGuard { .. } | CoreError::BasisTooLarge { .. } => exit_code::NUMERICAL_GUARD,
                CoreError::InvalidLattice { .. }
                | CoreError::UnknownLattice(_)
                | CoreError::ParticleNumber { .. }
                | CoreError::EmptyWindow { .. }
                | CoreError::EmptySector(_) => exit_code::CONFIG,
                _ => exit_code::FAILURE,
            },
            _ => exit_code::FAILURE,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
