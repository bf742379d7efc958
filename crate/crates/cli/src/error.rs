use fcd_core::Error;
use std::fmt;

/// CLI failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: missing or unreadable files.
    Io(String),
    /// Exit 3: rejected command line, already rendered by the parser.
    Usage(String),
    /// Exit 3: bad flags, dimension or size violations.
    Validation(String),
    /// Exit 4: divergence, ambiguity, failed constructions.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 2,
            CliError::Usage(_) | CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    /// Prefixes the message with the operation that failed.
    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Io(m) => CliError::Io(format!("{what}: {m}")),
            CliError::Usage(m) => CliError::Usage(m),
            CliError::Validation(m) => CliError::Validation(format!("{what}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{what}: {m}")),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) | CliError::Usage(m) | CliError::Validation(m) | CliError::Numerical(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Parse { .. } => CliError::Io(e.to_string()),
            e if e.is_numerical() => CliError::Numerical(e.to_string()),
            e => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(format!("JSON: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches a path to I/O failures while reading an input.
pub fn reading<T>(path: &std::path::Path, r: fcd_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::from(e).context(&path.display().to_string()))
}
