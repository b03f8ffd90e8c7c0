use thiserror::Error;

/// Errors raised anywhere in the detection pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("unsupported gate for shift-rule differentiation: {0}")]
    UnsupportedGate(String),

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse { row: usize, column: String, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("training diverged at epoch {epoch} (non-finite loss)")]
    Diverged { epoch: usize },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("denoising rejected: {0}")]
    Denoise(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code: 1 usage/config, 2 data, 3 training divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Usage(_) | Error::UnsupportedGate(_) | Error::UndefinedCorrelation(_) => 1,
            Error::Diverged { .. } => 3,
            Error::Parse { .. }
            | Error::Schema(_)
            | Error::Denoise(_)
            | Error::ModelFormat(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 2,
        }
    }
}
