use std::fmt;

use npos_abc::Error;

/// A failure with its exit status: 1 for semantic errors, 2 for malformed
/// input.
#[derive(Debug)]
pub enum CliError {
    Semantic(String),
    Parse(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Semantic(_) => 1,
            CliError::Parse(_) => 2,
        }
    }

    pub fn semantic(msg: impl Into<String>) -> Self {
        CliError::Semantic(msg.into())
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Semantic(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Semantic(msg) | CliError::Parse(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::Parse(_) => CliError::Parse(err.to_string()),
            other => CliError::Semantic(other.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Semantic(format!("writing CSV: {err}"))
    }
}
