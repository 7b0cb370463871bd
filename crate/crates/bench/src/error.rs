use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] ams_core::Error),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config file: {0}")]
    Toml(#[from] toml::de::Error),
}

impl BenchError {
    /// Process exit code: 2 for bad input, 3 for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::Toml(_) => 2,
            BenchError::Core(ams_core::Error::Domain(_)) => 2,
            BenchError::Core(_) | BenchError::Numerical(_) => 3,
            BenchError::Io(_) | BenchError::Csv(_) | BenchError::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;

macro_rules! config_error {
    ($($arg:tt)*) => {
        $crate::error::BenchError::Config(format!($($arg)*))
    };
}
pub(crate) use config_error;
