use thiserror::Error;

/// Errors raised by model construction and numerical operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a documented invariant; `field` names the offending part.
    #[error("invalid configuration in `{field}`: {message}")]
    Config { field: String, message: String },

    /// A numeric parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Mismatched sizes between a kernel, a measure or a vector.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// The request is well-formed but outside what this library evaluates.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// A symmetric-process operation was called on a process whose exponent has
    /// a nonzero imaginary part at `xi`.
    #[error("process is not symmetric: Im Ψ({xi:?}) = {im:e}; use g_gamma with an explicit sign part")]
    NotSymmetric { xi: Vec<f64>, im: f64 },

    /// A numerical invariant failed during evaluation.
    #[error("numerical invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
