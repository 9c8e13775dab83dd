//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input fell outside the domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Array shapes or dimensions do not line up.
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    /// A loss or derivative evaluated to a non-finite value.
    #[error("non-finite value in {op}: {detail}")]
    NonFinite { op: &'static str, detail: String },

    /// Name not present in a registry (problems, functions, parameter arrays).
    #[error("unknown name {name:?}; known: {known}")]
    UnknownName { name: String, known: String },

    /// A configuration field failed validation.
    #[error("invalid config: {0}")]
    Config(String),

    /// Serialization or file I/O failure.
    #[error("i/o error in {op}: {detail}")]
    Io { op: &'static str, detail: String },
}

impl Error {
    pub fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { op, detail: detail.into() }
    }

    pub fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Shape { op, detail: detail.into() }
    }

    pub fn non_finite(op: &'static str, detail: impl Into<String>) -> Self {
        Error::NonFinite { op, detail: detail.into() }
    }

    pub fn config(detail: impl Into<String>) -> Self {
        Error::Config(detail.into())
    }

    pub fn io(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Io { op, detail: detail.into() }
    }
}
