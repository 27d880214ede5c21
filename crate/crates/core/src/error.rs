//! Error type shared by every module in the crate.

use thiserror::Error;

/// Everything that can go wrong across resampling, filtering, data handling,
/// and the benchmark harnesses.
#[derive(Debug, Error)]
pub enum SmcError {
    /// Raw weights were unusable: empty, negative, non-finite, or all zero.
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    /// A count argument (particles, replicates, repetition order) was zero
    /// where a positive value is required.
    #[error("invalid count: {0}")]
    InvalidCount(String),

    /// Model parameters violate their domain (e.g. a non-positive variance).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A benchmark or filter configuration is internally inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Every particle received zero likelihood at the given time step, so the
    /// normalized weights are undefined and the filter cannot continue.
    #[error("weight collapse at step {step}: all particle weights are zero")]
    WeightCollapse { step: usize },

    /// A CSV input could not be parsed; `row` is the 1-based line number in
    /// the file (the header is line 1).
    #[error("parse error at row {row}: {msg}")]
    ParseError { row: usize, msg: String },

    /// An input series is too short for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An output file could not be written.
    #[error("write error: {0}")]
    WriteError(#[from] std::io::Error),

    /// The requested benchmark is only defined for a different model family.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
}
