//! Experiment driver behind the `hbs` binary.

pub mod config;
pub mod experiments;
pub mod output;

use hbs_core::HbsError;
use thiserror::Error;

pub use config::{parse_config, Experiment, ExperimentConfig, Geometry, Rhs};
pub use experiments::run;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] HbsError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(HbsError::Io(_)) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 3,
        }
    }
}
