use thiserror::Error;

/// Command failures, each mapped to a stable process exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    ResourceCap(String),
    #[error("{0}")]
    NoSolution(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::ResourceCap(_) => 3,
            CliError::NoSolution(_) => 4,
        }
    }
}

impl From<turnpath_core::Error> for CliError {
    fn from(e: turnpath_core::Error) -> Self {
        match e {
            turnpath_core::Error::CapExceeded(cap) => {
                CliError::ResourceCap(format!("more than {cap} sequences; use a larger tau or raise --cap"))
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
