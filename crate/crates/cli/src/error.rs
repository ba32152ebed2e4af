use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] heckelab::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// 2 for bad or unsupported input, 1 for failures inside a computation.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Json { .. } => 2,
            CliError::Core(
                heckelab::Error::Invalid(_)
                | heckelab::Error::UnsupportedGroup(_)
                | heckelab::Error::UnsupportedField(_)
                | heckelab::Error::UnsupportedCell(_),
            ) => 2,
            CliError::Core(_) => 1,
        }
    }
}
