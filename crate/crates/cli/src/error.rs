use std::fmt;

use wrv_core::Error;

/// Command failure with its process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad flags, config file or output location; exit status 1.
    Config(String),
    /// Unreadable or malformed input data; exit status 2.
    Data(String),
    /// An estimator diverged; exit status 3.
    Divergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Divergence(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Divergence(m) => write!(f, "numeric divergence: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e.root() {
            Error::NumericOverflow { .. } => CliError::Divergence(message),
            Error::InvalidConfig(_) => CliError::Config(message),
            _ => CliError::Data(message),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn output_error(path: &std::path::Path, e: impl fmt::Display) -> CliError {
    CliError::Config(format!("cannot write {}: {e}", path.display()))
}
