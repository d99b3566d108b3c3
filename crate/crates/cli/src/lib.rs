//! Library surface of the experiment driver (the `slowlight` binary is a
//! thin wrapper over these modules).

pub mod config;
pub mod report;
pub mod runner;

use thiserror::Error;

/// Driver errors, mapped onto process exit codes by the binary.
#[derive(Debug, Error)]
pub enum CliError {
    /// Config schema violation or bad CLI arguments (exit 2).
    #[error("config error: {0}")]
    Config(String),
    /// Physics/runtime error from the simulation core (exit 3).
    #[error("physics error: {0}")]
    Physics(#[from] slowlight::Error),
    /// Filesystem/output error (exit 4).
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Physics(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}
