use thiserror::Error;

/// Errors produced by the extraction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or inconsistent configuration (bad filterbank geometry,
    /// FFT size smaller than the frame, out-of-range coefficients, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Audio input that the pipeline refuses to process.
    #[error("audio error: {0}")]
    Audio(String),

    /// An operation was called with arguments that violate its contract.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid synthesizer parameters.
    #[error("synthesis error: {0}")]
    Synth(String),

    /// Malformed feature file or unsupported layout on read.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
