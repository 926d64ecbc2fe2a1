use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("matrix is not positive semi-definite: lambda_min = {lambda_min:e}")]
    NotPsd { lambda_min: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Core(srlab::Error),
}

impl From<srlab::Error> for CliError {
    fn from(e: srlab::Error) -> Self {
        match e {
            srlab::Error::NotPsd { lambda_min } => CliError::NotPsd { lambda_min },
            srlab::Error::InvalidParameter(m)
            | srlab::Error::InvalidExponent(m)
            | srlab::Error::InvalidSample(m) => CliError::InvalidParams(m),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    /// 2 for unusable input, 3 for a PSD requirement on an indefinite
    /// matrix, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Io { .. } | CliError::InvalidParams(_) => 2,
            CliError::NotPsd { .. } => 3,
            CliError::Core(_) => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
