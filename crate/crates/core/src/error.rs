use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 8")]
    GridSize(usize),
    #[error("box length must be positive and finite, got {0}")]
    GridLength(f64),
    #[error("field has {got} samples but the grid has {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("dissipation exponent {0} outside the admissible range {1}")]
    Alpha(f64, &'static str),
    #[error("time must be positive, got {0}")]
    Time(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("rescaling by {lambda} is not resolvable on this grid: {reason}")]
    Rescale { lambda: f64, reason: &'static str },
    #[error("quadrature did not converge: error estimate {estimate:.3e} above tolerance {tolerance:.3e}")]
    Quadrature { estimate: f64, tolerance: f64 },
    #[error("cfl violation: dt = {dt:.4e} exceeds limit {limit:.4e}")]
    Cfl { dt: f64, limit: f64 },
    #[error("numerical abort at t = {t:.6}: non-finite spectral state")]
    NumericalAbort { t: f64 },
    #[error("insufficient frames: {0}")]
    InsufficientFrames(String),
    #[error("trajectory frames do not match: {0}")]
    FrameMismatch(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("grid of {n} points exceeds the oracle cap of {cap}")]
    GridTooLarge { n: usize, cap: usize },
}
