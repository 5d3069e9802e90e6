use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An instance or allocation failed a structural check.
    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },

    /// An agent index or good id does not exist in the instance.
    #[error("invalid reference: {0}")]
    InvalidReference(String),

    /// The exact MMS search was asked for more than it is configured to handle.
    #[error(
        "oracle capacity exceeded: {goods} goods into {parts} parts \
         (limit {max_goods} goods, {max_parts} parts)"
    )]
    Capacity {
        goods: usize,
        parts: usize,
        max_goods: usize,
        max_parts: usize,
    },

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A property that the algorithm guarantees did not hold at runtime.
    #[error("internal invariant violated: {message}")]
    InternalInvariant { message: String, trace: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn contract(message: impl Into<String>) -> Self {
        Error::Contract(message.into())
    }
}
