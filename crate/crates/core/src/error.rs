use thiserror::Error;

/// Errors produced by the copula routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A generator parameter is outside the admissible range of its family.
    #[error("invalid generator parameter: {0}")]
    Config(String),

    /// An evaluation point lies on the boundary of the unit cube (or of `[0, inf]`).
    #[error("boundary value {value} for {what}")]
    Boundary { what: &'static str, value: f64 },

    /// The nesting structure or family pair has no closed-form support.
    #[error("unsupported structure: {0}")]
    Unsupported(String),

    /// A data row is malformed or outside the open unit cube.
    #[error("row {row}: {msg}")]
    Data { row: usize, msg: String },

    /// The structure expression could not be parsed.
    #[error("parse error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    /// A quantity that must be positive came out non-positive after rounding.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
