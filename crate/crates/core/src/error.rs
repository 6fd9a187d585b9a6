use thiserror::Error;

/// Errors raised by the numerical modules.
///
/// Every variant has a stable machine-readable code, see [`Error::code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the unit disk")]
    PointOutsideDisk { x: f64, y: f64 },
    #[error("integrator diverged: area defect {defect:e} at t = {t}")]
    IntegratorDiverged { defect: f64, t: f64 },
    #[error("angle increments stay above 1/4 turn after {doublings} grid doublings")]
    RefinementLimitExceeded { doublings: u32 },
    #[error("boundary sample left the unit circle by {deviation:e}")]
    BoundaryNotPreserved { deviation: f64 },
    #[error("sampled boundary lift is not increasing at sample {index}")]
    MonotonicityViolation { index: usize },
    #[error("strands {i} and {j} come within {distance:e} of each other")]
    CollisionDetected { i: usize, j: usize, distance: f64 },
    #[error("projection stays degenerate after {retries} axis rotations")]
    ProjectionDegenerate { retries: u32 },
    #[error("strand count mismatch: {left} vs {right}")]
    StrandMismatch { left: usize, right: usize },
    #[error("braid is not pure")]
    NotPure,
    #[error("{rejected} of {draws} configuration draws rejected")]
    ExcessiveRejection { rejected: usize, draws: usize },
    #[error("Hamiltonian does not vanish near the boundary: {0}")]
    NotCompactlySupported(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::PointOutsideDisk { .. } => "PointOutsideDisk",
            Error::IntegratorDiverged { .. } => "IntegratorDiverged",
            Error::RefinementLimitExceeded { .. } => "RefinementLimitExceeded",
            Error::BoundaryNotPreserved { .. } => "BoundaryNotPreserved",
            Error::MonotonicityViolation { .. } => "MonotonicityViolation",
            Error::CollisionDetected { .. } => "CollisionDetected",
            Error::ProjectionDegenerate { .. } => "ProjectionDegenerate",
            Error::StrandMismatch { .. } => "StrandMismatch",
            Error::NotPure => "NotPure",
            Error::ExcessiveRejection { .. } => "ExcessiveRejection",
            Error::NotCompactlySupported(_) => "NotCompactlySupported",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// Whether the error stems from malformed input rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::InvalidSpec(_) | Error::InvalidArgument(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
