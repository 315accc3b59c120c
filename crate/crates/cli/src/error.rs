use gcflab::error::GcfError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: expected {expected}")]
    BadValue { key: String, value: String, expected: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Numerics(#[from] GcfError),
    #[error("{0}")]
    Help(String),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    /// 1 failed checks, 2 configuration, 3 file system, 4 numerics.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::ChecksFailed(_) => 1,
            CliError::UnknownKey(_) | CliError::BadValue { .. } | CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Numerics(_) => 4,
        }
    }

    pub(crate) fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.display().to_string(), message: e.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
