use alloc::string::String;

/// Errors raised by the analysis core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A distribution or model parameter violates its invariant.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    /// An argument is outside the operation's domain.
    #[error("invalid input: {0}")]
    Input(String),

    /// A classifier needs more intervals than the configured bound allows.
    #[error(
        "classifier needs {found} intervals but the bound is {bound}; raise the complexity bound"
    )]
    Complexity { found: usize, bound: usize },

    /// The request would exceed a resource limit.
    #[error("resource limit: {0}")]
    Resource(String),

    /// An operation's contract does not cover the given arguments.
    #[error("contract violated: {0}")]
    Contract(String),

    /// A named scenario does not exist.
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T> = core::result::Result<T, Error>;
