use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate variance profile: {0}")]
    ZeroVariance(String),

    #[error("Nyquist condition violated: {antennas} antennas < {dof} degrees of freedom")]
    NyquistViolation { antennas: usize, dof: usize },

    #[error("at least 2 Monte-Carlo trials are required, got {0}")]
    InsufficientTrials(usize),

    #[error("root finding did not converge: {0}")]
    NonConvergence(String),

    #[error("grid box too small: maximum found on the outer boundary at ({n_s}, {n_r})")]
    BoxTooSmall { n_s: u64, n_r: u64 },

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical routines (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence(_) | Error::BoxTooSmall { .. } | Error::ZeroVariance(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
