//! Error types shared across the toolkit.

use thiserror::Error;

/// Toolkit-wide error type.
#[derive(Debug, Error)]
pub enum DeidError {
    /// A file could not be parsed. Carries the location (file or line) so the
    /// offending input can be found.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// Input data violates a documented invariant (overlapping annotations,
    /// out-of-bounds offsets, duplicate entities, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A configuration value is out of range or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A required resource (lookup list, surrogate pool) is missing or empty.
    #[error("missing resource: {0}")]
    MissingResource(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl DeidError {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        DeidError::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        DeidError::InvalidData(message.into())
    }

    pub fn config(message: impl Into<String>) -> Self {
        DeidError::InvalidConfig(message.into())
    }
}

pub type Result<T> = std::result::Result<T, DeidError>;
