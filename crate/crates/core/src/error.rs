//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("image size mismatch: {0}x{1} vs {2}x{3}")]
    ImageSizeMismatch(usize, usize, usize, usize),

    #[error("voxel grids have different specs")]
    GridSpecMismatch,

    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    #[error("point is outside the hair shell")]
    OutsideHairShell,

    #[error("orientation output is degenerate (near-zero norm)")]
    DegenerateOrientation,

    #[error("non-finite loss at iteration {iter}; diagnostics: {diagnostics}")]
    NonFiniteLoss { iter: usize, diagnostics: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed {format}: {detail}")]
    Format { format: &'static str, detail: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            why: why.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
