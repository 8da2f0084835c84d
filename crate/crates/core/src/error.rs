use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A game parameter violates its invariant. `field` is a dotted path
    /// such as `transmitter.costs.c10`.
    #[error("{field}: {reason}")]
    InvalidParam { field: String, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("transmitter and receiver parameters differ; the team problem needs identical agents")]
    MismatchedAgents,

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParam { field: field.into(), reason: reason.into() }
    }

    /// Prefixes the field path of an `InvalidParam` error.
    pub fn within(self, prefix: &str) -> Self {
        match self {
            Error::InvalidParam { field, reason } => Error::InvalidParam { field: format!("{prefix}.{field}"), reason },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
