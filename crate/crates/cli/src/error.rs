use thiserror::Error;

/// Failure of a command, mapped onto a process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),

    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Validation(_) => "validation",
            CliError::Numerical(_) => "numerical",
        }
    }
}

impl From<qpolar_core::Error> for CliError {
    fn from(e: qpolar_core::Error) -> Self {
        use qpolar_core::Error as E;
        match e {
            E::Numerical(_) | E::SingularDecomposition { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
