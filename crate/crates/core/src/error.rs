use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of input could not be parsed.
    #[error("line {line}: field `{field}`: {message}")]
    Format {
        line: usize,
        field: String,
        message: String,
    },

    /// Input parsed but broke a record or corpus invariant.
    #[error("record {key}: {message}")]
    Validation { key: String, message: String },

    /// Records that must agree (same sentence, joined prediction) do not.
    #[error("record {key}: {message}")]
    Consistency { key: String, message: String },

    /// A caller-supplied argument is out of its domain.
    #[error("{0}")]
    Argument(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn format(
        line: usize,
        field: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Error::Format {
            line,
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn validation(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn consistency(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Consistency {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn argument(message: impl Into<String>) -> Self {
        Error::Argument(message.into())
    }

    /// True for errors caused by the content of an input file rather than
    /// by how the toolkit was invoked.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Format { .. } | Error::Validation { .. } | Error::Consistency { .. }
        )
    }
}
