use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("relation arity {needed} exceeds the configured maximum {max}")]
    ArityOverflow { needed: usize, max: usize },
    #[error("stage budget exhausted with {residual} demands still queued")]
    InsufficientBudget { residual: usize },
    #[error("instance too large: {0}")]
    TooLarge(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
