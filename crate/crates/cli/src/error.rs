use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or out-of-range parameters; exit status 2.
    #[error("{0}")]
    Usage(String),
    /// A numerical routine failed; exit status 1.
    #[error("{0}")]
    Numerical(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<ewa_core::Error> for CliError {
    fn from(e: ewa_core::Error) -> Self {
        use ewa_core::Error::*;
        match e {
            InvalidParameter { .. } | Domain(_) | Hypothesis(_) => CliError::Usage(e.to_string()),
            NonConvergence { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Numerical(format!("cannot serialise result: {e}"))
    }
}
