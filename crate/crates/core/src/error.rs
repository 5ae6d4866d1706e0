use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("correlation vector lies outside the Bell-diagonal tetrahedron (min eigenvalue {min_eigenvalue:e})")]
    NonPhysical { min_eigenvalue: f64 },

    #[error("invalid Bell spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("measurement outcome probability {0:e} too small")]
    DegenerateProbability(f64),

    #[error("grid too coarse: discrete norm of mode deviates from 1 by {deviation:e}")]
    GridTooCoarse { deviation: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields or maps live on different grids")]
    GridMismatch,

    #[error("superposition needs at least one term")]
    EmptyTermList,

    #[error("both interferometer arms carry zero intensity")]
    ZeroPower,

    #[error("image has zero total counts")]
    EmptyImage,

    #[error("basis images are indistinguishable (separation {separation:e})")]
    DegenerateBasis { separation: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("image shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("malformed PGM file {path}: {reason}")]
    Pgm { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error when surfaced by the command line.
    ///
    /// 2 usage/invalid input, 3 I/O, 4 shape mismatch, 5 degenerate basis,
    /// 6 empty image.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } | Error::Pgm { .. } => 3,
            Error::ShapeMismatch(_) | Error::GridMismatch => 4,
            Error::DegenerateBasis { .. } => 5,
            Error::EmptyImage => 6,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
