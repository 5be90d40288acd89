use std::fmt::Display;

use iospectra::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Numeric(#[from] Error),
    #[error("{0} frequencies were singular")]
    SingularRows(usize),
}

impl CliError {
    pub fn io(path: impl Display, err: std::io::Error) -> Self {
        CliError::Io(format!("{path}: {err}"))
    }

    /// 2 for I/O, 3 for numerical failures, 4 for invalid configuration.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Config(_) => 4,
            CliError::SingularRows(_) => 3,
            CliError::Numeric(e) => match e {
                Error::InvalidSpec(_)
                | Error::Parse(_)
                | Error::InvalidA(_)
                | Error::DimensionMismatch(_)
                | Error::TooLarge(_) => 4,
                _ => 3,
            },
        }
    }
}
