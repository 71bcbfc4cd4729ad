use thiserror::Error;

/// Command failure, mapped to the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Data(String),

    /// The time limit passed before any result was produced.
    #[error("{0}")]
    NoResult(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::NoResult(_) => 4,
        }
    }
}

impl From<probjss::Error> for CliError {
    fn from(e: probjss::Error) -> Self {
        match e {
            probjss::Error::InvalidParameter(_) => CliError::Usage(e.to_string()),
            probjss::Error::Unavailable(_) => CliError::NoResult(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
