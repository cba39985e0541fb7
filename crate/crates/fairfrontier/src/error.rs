use std::path::PathBuf;

use fairfrontier_core::Error as CoreError;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status when a check or oracle comparison fails.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit status for invalid configuration, scenario files or parameters.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status when a resource limit would be exceeded.
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A scenario or configuration file could not be parsed.
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// The scenario parsed but failed validation.
    #[error("scenario `{label}` failed validation:\n{details}")]
    Validation { label: String, details: String },

    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::Resource(_)) => EXIT_RESOURCE,
            CliError::Core(_)
            | CliError::Parse { .. }
            | CliError::Config(_)
            | CliError::Validation { .. } => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_VALIDATION,
            CliError::CheckFailed(_) => EXIT_CHECK_FAILED,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
