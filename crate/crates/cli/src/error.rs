use std::fmt;
use std::path::Path;
use std::process::ExitCode;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1.
    Io(String),
    /// Exit 2; clap also uses 2 for malformed command lines.
    Usage(String),
    /// Exit 3: inputs rejected by a precondition.
    Validation(String),
    /// Exit 4: the numerics failed on valid inputs.
    Numerical(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<bosewalk::Error> for CliError {
    fn from(e: bosewalk::Error) -> Self {
        match e {
            bosewalk::Error::Io(io) => CliError::Io(io.to_string()),
            e if e.is_validation() => CliError::Validation(e.to_string()),
            e => CliError::Numerical(e.to_string()),
        }
    }
}
