use thiserror::Error;

/// Errors raised by the fractional operators, checks and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fractional order {0} outside (0, 1]")]
    InvalidOrder(f64),

    #[error("degenerate interval [{a}, {b}]: need a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("point {x} outside [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature construction failed: {0}")]
    Quadrature(String),

    #[error("inadmissible function: {0}")]
    Admissibility(String),

    #[error("inconsistent lagrangian: {0}")]
    Lagrangian(String),

    #[error("unsupported surface: {0}")]
    UnsupportedSurface(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;
