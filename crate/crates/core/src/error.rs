use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid embedding: {0}")]
    Embedding(String),

    #[error("invalid gadget size {0}: subdivided cycles need at least 3 vertices")]
    Size(usize),

    #[error("separator failure: {0}")]
    Separator(String),

    #[error("bit stream truncated at bit {at} (length {len})")]
    Codec { at: usize, len: usize },

    #[error("label format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn embedding(message: impl Into<String>) -> Self {
        Error::Embedding(message.into())
    }

    pub(crate) fn format(message: impl Into<String>) -> Self {
        Error::Format(message.into())
    }
}
