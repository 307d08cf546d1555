use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] nonlocality::Error),

    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("cannot serialize output: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    /// 0 success, 2 argument error, 3 domain outcome, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        use nonlocality::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                E::InvalidDimension(_) | E::Shape(_) | E::Domain(_) | E::Capacity { .. } => 2,
                E::NoViolation { .. } => 3,
                E::NotHermitian(_) | E::NotUnitary(_) | E::NotBlockDiagonal(_) | E::NoConvergence(_) => 4,
            },
            CliError::Json(_) => 4,
        }
    }
}
