//! Library surface of the `latsel` experiment runner: configuration,
//! experiment execution, and report-file schemas. The binary in `main.rs`
//! is a thin argument-parsing wrapper over [`experiments::run_experiment`].

pub mod config;
pub mod experiments;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error(transparent)]
    Core(#[from] latsel_core::Error),
}

impl CliError {
    /// Process exit code: 2 for configuration/environment problems, 3 for
    /// solver non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NonConvergence(_) => 3,
            _ => 2,
        }
    }
}
