use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: unsupported image format: {detail}")]
    UnsupportedFormat { path: PathBuf, detail: String },

    #[error("{path}: corrupt header at byte {offset}: {detail}")]
    CorruptHeader {
        path: PathBuf,
        offset: usize,
        detail: String,
    },

    #[error("{path}: truncated pixel data at byte {offset}: expected {expected} bytes, found {found}")]
    TruncatedData {
        path: PathBuf,
        offset: usize,
        expected: usize,
        found: usize,
    },

    #[error("{0}: png error: {1}")]
    Png(PathBuf, String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("thresholds must be strictly increasing, got {0:?}")]
    NonIncreasingThresholds(Vec<u32>),

    #[error("degenerate fuzzy parameters: thresholds {0:?} collapse")]
    CollapsedThresholds(Vec<u32>),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
