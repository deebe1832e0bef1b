use thiserror::Error;

/// Errors produced by the estimation, diagnostics and experiment layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample too small: nearest-neighbor statistics need at least {required} points, got {got}")]
    SampleTooSmall { required: usize, got: usize },

    #[error("duplicate points at indices {first} and {second}: nearest-neighbor distance is zero")]
    DuplicatePoints { first: usize, second: usize },

    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate at point {point}, axis {axis}")]
    NonFinite { point: usize, axis: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ball mass standard error {achieved:.3e} above target {target:.3e} after {draws} draws")]
    PrecisionUnachievable {
        target: f64,
        achieved: f64,
        draws: usize,
    },

    #[error("no exact ball mass for {0}; enable Monte Carlo ball mass to proceed")]
    BallMassUnavailable(String),

    #[error("operation expects {expected} input")]
    WrongSampleKind { expected: &'static str },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
