use std::path::Path;
use std::process::ExitCode;

use impulsive_duffing::scenario::ScenarioError;
use impulsive_duffing::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        })
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Io(m) => CliError::Io(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidTolerance { .. }
            | Error::InvalidArgument(_)
            | Error::ScheduleOrdering(_)
            | Error::SplitCondition { .. } => CliError::Validation(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}
