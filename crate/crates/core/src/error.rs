use thiserror::Error;

use crate::sphere_fn::CriticalPoint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("direction is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("expected a direction with {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid sphere function: {0}")]
    InvalidFunction(String),

    #[error("not into R+: value {value} at {witness:?}")]
    NotPositive { witness: Vec<f64>, value: f64 },

    #[error("incomplete census ({reason}); {} partial points", partial.len())]
    IncompleteCensus {
        reason: String,
        partial: Vec<CriticalPoint>,
    },

    #[error("translation out of interior: distance to boundary {margin}, required {required}")]
    OutOfInterior { margin: f64, required: f64 },

    #[error("newton did not converge (best residual {residual})")]
    NoConvergence { residual: f64 },

    #[error("degenerate hull: {0}")]
    DegenerateHull(String),

    #[error("stabilization failed after {tries} tries: {diagnosis}")]
    TriesExhausted { tries: usize, diagnosis: String },

    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
