//! Batch driver: one scenario file in, one JSON report (or CSV figure data) out.

pub mod commands;
pub mod config;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<endomass::Error> for CliError {
    fn from(e: endomass::Error) -> Self {
        match e {
            endomass::Error::Domain { .. } | endomass::Error::Invalid(_) | endomass::Error::Config(_) => {
                CliError::Config(e.to_string())
            }
            endomass::Error::Contract(_) | endomass::Error::Numerical(_) => CliError::Numerical(e.to_string()),
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_ORACLE_FAIL: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}
