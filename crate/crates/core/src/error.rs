use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric (max |M - Mᵀ| = {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("eigenvalue map produced an invalid value {value} at eigenvalue {eigval}")]
    RangeViolation { eigval: f64, value: f64 },
    #[error("gamma must lie in [0, 1], got {0}")]
    GammaOutOfRange(f64),
    #[error("interpolation eigenvalue {value} at index {index} is outside (0, 1)")]
    EigvalOutOfRange { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("horizon mismatch: expected {expected}, got {got}")]
    HorizonMismatch { expected: usize, got: usize },
    #[error("matrix is not a scalar multiple of the identity")]
    NotScalarMatrix,
    #[error("offline solve failed: KKT residual {residual:e} exceeds {tolerance:e}")]
    SolveFailure { residual: f64, tolerance: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("scenario tree horizon {0} exceeds the maximum of 8")]
    HorizonTooLarge(usize),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
