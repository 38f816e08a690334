//! Error type for the command-line front end.
//!
//! Analysis errors from the core library pass through unchanged so their
//! category labels stay meaningful; configuration and filesystem problems
//! picked up by the front end itself get their own variants.

use thiserror::Error;

/// Anything that can stop a command from completing.
#[derive(Debug, Error)]
pub enum CliError {
    /// An error raised by the analysis library.
    #[error(transparent)]
    Core(#[from] zca_core::Error),
    /// A problem with command-line flags or a configuration file.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A filesystem error while reading inputs or writing outputs.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Stable machine-readable label used in the `error[...]` prefix on stderr.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Core(inner) => inner.category(),
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
        }
    }
}

/// Shorthand result type used throughout the front end.
pub type Result<T> = std::result::Result<T, CliError>;
