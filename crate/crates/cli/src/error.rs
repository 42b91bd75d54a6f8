use std::fmt;

/// Failure classes of a run, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration or inputs; message starts with the field path.
    #[error("validation error: {0}")]
    Validation(String),
    /// Tracking loss, failed bracketing or an undefined protocol.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn field(path: impl fmt::Display, msg: impl fmt::Display) -> Self {
        CliError::Validation(format!("{path}: {msg}"))
    }

    pub fn io(path: impl fmt::Display, err: impl fmt::Display) -> Self {
        CliError::Io(format!("{path}: {err}"))
    }
}

impl From<molspin::Error> for CliError {
    fn from(e: molspin::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches a config path to core errors that are really input problems.
pub(crate) trait Context<T> {
    fn at(self, path: &str) -> CliResult<T>;
}

impl<T> Context<T> for molspin::Result<T> {
    fn at(self, path: &str) -> CliResult<T> {
        self.map_err(|e| match CliError::from(e) {
            CliError::Validation(m) => CliError::field(path, m),
            other => other,
        })
    }
}
