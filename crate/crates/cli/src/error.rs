//! Failure kinds of a run and their exit codes. Exit code 2 is left to
//! command-line parsing.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("computation failed: {0}")]
    Compute(#[from] lorentz_wire_core::Error),
    #[error("{0} verification report(s) failed")]
    VerifyFailed(usize),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::MissingFile(_) => 4,
            CliError::Compute(_) => 5,
            CliError::VerifyFailed(_) => 6,
            CliError::Output(_) => 7,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
