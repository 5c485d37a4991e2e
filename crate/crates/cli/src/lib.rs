//! Batch front end for `chancert`: JSON matrix files in, reports and CSV grids out.

pub mod commands;
pub mod files;

pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Solver(String),
    #[error(transparent)]
    Core(#[from] chancert::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT_ERROR,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Core(chancert::Error::NotConverged(_) | chancert::Error::Lp(_)) => EXIT_SOLVER,
            CliError::Core(_) => EXIT_INPUT_ERROR,
        }
    }
}

/// What a command prints and the process exit code it asks for.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
}
