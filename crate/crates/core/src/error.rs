//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the numeric kernels, models, and data loaders.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes do not conform.
    #[error("dimension mismatch in {op}: {details}")]
    Dimension { op: &'static str, details: String },

    /// An iterative routine ran out of its iteration budget.
    #[error("{op} failed to converge: {details}")]
    Convergence { op: &'static str, details: String },

    /// A value left the finite range (NaN or infinity).
    #[error("non-finite value in {op}: {details}")]
    NonFinite { op: &'static str, details: String },

    /// Invalid configuration (unsupported scheme/shape combination,
    /// out-of-range hyperparameter, bad enum value).
    #[error("configuration error: {0}")]
    Config(String),

    /// An eigenbasis is too ill-conditioned to use.
    #[error("decomposition error: {0}")]
    Decomposition(String),

    /// Dataset generation could not satisfy its contract.
    #[error("generation error: {0}")]
    Generation(String),

    /// A binary payload does not match its declared format.
    #[error("format error at offset {offset}: {details}")]
    Format { offset: usize, details: String },

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dim(op: &'static str, details: impl Into<String>) -> Self {
        Error::Dimension {
            op,
            details: details.into(),
        }
    }

    pub(crate) fn non_finite(op: &'static str, details: impl Into<String>) -> Self {
        Error::NonFinite {
            op,
            details: details.into(),
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
