//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input sequences that must be aligned have different lengths.
    #[error("alignment error: {context} (lengths {left} and {right})")]
    Alignment {
        context: &'static str,
        left: usize,
        right: usize,
    },

    /// A NaN or infinity where a finite number is required.
    #[error("non-finite value at position {index} in {context}")]
    NonFinite { context: &'static str, index: usize },

    /// A parameter outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// Not enough observations for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A window Gram matrix that cannot be inverted.
    #[error("rank-deficient regressor window at forecast origin {origin}")]
    RankDeficient { origin: usize },

    /// A test statistic whose denominator is identically zero.
    #[error("degenerate statistic: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub fn insufficient(msg: impl Into<String>) -> Self {
        Error::InsufficientData(msg.into())
    }
}
