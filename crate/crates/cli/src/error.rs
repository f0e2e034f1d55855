use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    /// 2 for bad input, 3 for numeric failure, 1 for output I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{ctx}: {m}")),
            CliError::Numeric(m) => CliError::Numeric(format!("{ctx}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{ctx}: {m}")),
        }
    }
}

impl From<csl_heat::Error> for CliError {
    fn from(e: csl_heat::Error) -> Self {
        use csl_heat::Error as E;
        match e {
            E::Accuracy { .. } | E::Numeric(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<csl_lab::Error> for CliError {
    fn from(e: csl_lab::Error) -> Self {
        match e {
            csl_lab::Error::Core(c) => c.into(),
            csl_lab::Error::InvalidInput(m) => CliError::Usage(m),
            csl_lab::Error::Integrator(m) => CliError::Numeric(m),
        }
    }
}
