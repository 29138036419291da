use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure ({code}): {message}")]
    Numerical { code: &'static str, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Classifies a library error as a numerical failure or a bad input.
    pub fn from_core(e: fluctlim::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical { code: e.code(), message: e.to_string() }
        } else {
            CliError::Config(format!("{} ({})", e, e.code()))
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config_error",
            CliError::Numerical { code, .. } => code,
            CliError::Io(_) => "io_error",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical { .. } => 3,
        }
    }
}
