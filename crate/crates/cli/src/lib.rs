//! Std companion to `glm-core`: file formats, reports, experiment harness
//! and the `glm` command-line tool.

pub mod config;
pub mod harness;
pub mod io;
pub mod report;

use thiserror::Error;

/// Errors carrying the CLI exit-code contract:
/// 2 for configuration/schema problems, 3 for numerical failures,
/// 1 for everything else (I/O).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<glm_core::Error> for CliError {
    fn from(err: glm_core::Error) -> Self {
        match err {
            glm_core::Error::Diverged { .. } | glm_core::Error::EigenNonConvergence(_) => {
                CliError::Numerical(err.to_string())
            }
            _ => CliError::Config(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
