//! Crate-wide error type.

use thiserror::Error;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by data handling, training, and numerical routines.
#[derive(Error, Debug)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("column '{0}' not found in CSV header")]
    MissingColumn(String),

    #[error("non-uniform time grid at row {row}: step {got} deviates from dt {dt}")]
    NonUniformGrid { row: usize, dt: f64, got: f64 },

    #[error("cannot parse cell '{value}' at row {row}, column '{column}'")]
    UnparseableCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("invalid parameter '{name}': {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("insufficient data: need at least {required} points, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("constant series: standard deviation is zero")]
    ConstantSeries,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("training diverged at iteration {iteration} (loss {loss})")]
    Diverged { iteration: usize, loss: f64 },

    #[error("state blow-up during integration at t = {time} (norm {norm:.3e})")]
    BlowUp { time: f64, norm: f64 },

    #[error("eigenvalue iteration did not converge for a {dim}x{dim} matrix (residual {residual:.3e})")]
    EigenNoConvergence { dim: usize, residual: f64 },

    #[error("found {found} spectral peaks, need {needed}")]
    TooFewPeaks { found: usize, needed: usize },

    #[error("optimizer stagnated after {restarts} restarts (best rmse {rmse:.3e})")]
    Stagnation { restarts: usize, rmse: f64 },

    #[error("exponential overflow: alpha*t = {exponent} exceeds 700")]
    Overflow { exponent: f64 },
}
