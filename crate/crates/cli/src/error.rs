use std::fmt;
use std::path::Path;

/// CLI failure, carrying its exit status class.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    /// Library error raised while processing `path`.
    pub fn at(path: &Path, e: tdasum::Error) -> Self {
        let msg = format!("{}: {e}", path.display());
        if e.is_numeric() {
            CliError::Numeric(msg)
        } else {
            CliError::Data(msg)
        }
    }
}

impl From<tdasum::Error> for CliError {
    fn from(e: tdasum::Error) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;
