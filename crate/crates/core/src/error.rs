use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at `{pointer}`: {message}")]
    Parse { pointer: String, message: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid grading: {0}")]
    InvalidGrading(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("invalid augmentation at `{generator}`: {reason}")]
    InvalidAugmentation { generator: String, reason: String },
    #[error("search space of {count} assignments exceeds the cap {cap}")]
    SearchTooLarge { count: u128, cap: u128 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    /// Internal-consistency failures are oracle disagreements, not bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }

    pub(crate) fn parse(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { pointer: pointer.into(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
