use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative probability {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("non-finite probability at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("distribution has no mass")]
    AllZero,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unknown axis `{0}`")]
    UnknownAxis(String),

    #[error("axis groups overlap on `{0}`")]
    OverlappingGroups(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("probabilities sum to {sum}, outside tolerance {tolerance}")]
    Normalization { sum: f64, tolerance: f64 },

    #[error("marginal of the decomposition differs from the source by {0:e}")]
    MarginalMismatch(f64),

    #[error("problem too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("curve is empty")]
    EmptyCurve,

    #[error("curve has {found} points, at least {needed} are required")]
    InsufficientPoints { found: usize, needed: usize },

    #[error("distortion {requested} on axis {axis} is below the minimum achievable {minimum}")]
    Infeasible {
        axis: &'static str,
        requested: f64,
        minimum: f64,
    },

    #[error("unsupported distortion measure: {0}")]
    UnsupportedDistortion(String),

    #[error("distortion must be positive, got {0}")]
    NonPositiveDistortion(f64),

    #[error("correlation coefficient must satisfy |rho| < 1, got {0}")]
    InvalidCorrelation(f64),

    #[error("distortions ({d1}, {d2}) are outside the lossless-CI regime for rho = {rho}")]
    RegimeMismatch { rho: f64, d1: f64, d2: f64 },

    #[error("solver did not converge: {0}")]
    NotConverged(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
