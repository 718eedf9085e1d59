//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("inner solver produced a non-finite iterate at inner iteration {iteration}")]
    NonFiniteIterate { iteration: usize },

    #[error("the relative tolerance schedule needs a current gradient norm (none available yet)")]
    MissingGradientNorm,

    #[error("potential does not expose an exact proximal map")]
    MissingExactProx,

    #[error("potential does not expose a smooth/nonsmooth splitting")]
    MissingSplitting,

    #[error("step size {eta} violates {constraint}")]
    StepSizeOutOfRange { eta: f64, constraint: &'static str },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("autocorrelation of a constant series is undefined (zero variance)")]
    ConstantSeries,

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt image file: {0}")]
    CorruptFile(String),

    #[error("degenerate blur signal-to-noise setup: {0}")]
    DegenerateBsnr(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

/// Checks that `got` equals the expected dimension.
pub fn ensure_dimension(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
