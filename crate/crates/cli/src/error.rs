use std::io;

use thiserror::Error;
use vnfperf_core::model::ValidationError;
use vnfperf_core::vmme::ScenarioError;
use vnfperf_core::{SimError, SolveError};

/// Process exit codes. Part of the scripting contract.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const UNSTABLE: i32 = 2;
    pub const DIVERGED: i32 = 3;
    pub const UNREACHABLE: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Unstable(String),
    #[error("{0}")]
    Diverged(String),
    #[error("{0}")]
    Unreachable(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => exit::INPUT,
            CliError::Unstable(_) => exit::UNSTABLE,
            CliError::Diverged(_) => exit::DIVERGED,
            CliError::Unreachable(_) => exit::UNREACHABLE,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::UnstableQueue { .. } => CliError::Unstable(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::SimDiverged { .. } => CliError::Diverged(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Solve(s) => s.into(),
            ScenarioError::TargetUnreachable { .. } => CliError::Unreachable(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}
