//! Error types shared across the analysis crates.

use thiserror::Error;

/// Errors produced by synthesis, analysis, and file handling.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration value is out of its documented range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The requested analysis span is not covered by usable signal,
    /// e.g. it reaches outside the constant-amplitude main part.
    #[error("analysis span not covered by usable signal: {0}")]
    Coverage(String),

    /// Too few zero crossings were found to fit the ideal crossing grid.
    #[error("insufficient signal: found {found} zero crossings, need at least {needed}")]
    InsufficientSignal { found: usize, needed: usize },

    /// Two recordings could not be aligned to a common crossing index.
    #[error("synchronization failed: {0}")]
    Synchronization(String),

    /// A WAV file violates the RIFF/PCM layout. The offset is the byte
    /// position at which the violation was detected.
    #[error("malformed WAV at byte {offset}: {message}")]
    WavFormat { offset: u64, message: String },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable category, suitable for exit-code mapping.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Coverage(_) => "coverage",
            Error::InsufficientSignal { .. } => "insufficient-signal",
            Error::Synchronization(_) => "synchronization",
            Error::WavFormat { .. } => "wav-format",
            Error::Io(_) => "io",
        }
    }
}

/// Convenience alias used throughout the workspace.
pub type Result<T> = std::result::Result<T, Error>;
