use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] randsum::Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 when the arguments are at fault, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        use randsum::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(E::QuadratureFailure(_) | E::Deconvolution(_)) => 1,
            CliError::Model(_) => 2,
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => 1,
        }
    }
}
