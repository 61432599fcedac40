//! CLI failure classification. Exit code 2 means the input or configuration
//! was rejected; exit code 3 means the solver ran but did not converge (or
//! broke down numerically).

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    NonConvergence(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "invalid input: {msg}"),
            CliError::NonConvergence(msg) => write!(f, "solver did not converge: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<stiefel_qp::Error> for CliError {
    fn from(e: stiefel_qp::Error) -> Self {
        match e {
            stiefel_qp::Error::NonFiniteIteration { .. } => CliError::NonConvergence(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
