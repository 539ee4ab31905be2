use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Solver(_) => 4,
        })
    }
}

impl From<vqmachine::Error> for CliError {
    fn from(e: vqmachine::Error) -> Self {
        use vqmachine::Error as E;
        match e {
            E::Solver(_) | E::Reducible | E::ZeroMarginal => CliError::Solver(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}
