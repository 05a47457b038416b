use thiserror::Error;

/// Errors raised by the sampling, scheduling and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A sample, arm or anchor index that does not exist.
    #[error("unknown {kind} index {index} (size {len})")]
    UnknownIndex {
        kind: &'static str,
        index: usize,
        len: usize,
    },

    /// A value outside its admissible range.
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    /// An operation that needs at least one element received none.
    #[error("{0} must not be empty")]
    Empty(&'static str),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Field path of a validation error, if any.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::Invalid { field, .. } => Some(field),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
