use thiserror::Error;

/// Failures raised by the pricing library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PricingError {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("pole of the transform: Re(w) = {0} must be positive")]
    Pole(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no admissible landing index for ln S = {0}")]
    NoAdmissibleK(f64),
    #[error("grid too coarse: lambda = {0} exceeds 1")]
    GridTooCoarse(f64),
    #[error("root not bracketed on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("negative radicand in boundary approximation: delta = {delta}, delta - 2q = {shifted}")]
    NegativeRadicand { delta: f64, shifted: f64 },
    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("imaginary residual {residual:e} exceeds tolerance {tolerance:e}")]
    ImagResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("{count} of {total} central lattice points clamped from negative values")]
    TooManyClamped { count: usize, total: usize },
    #[error("log price {log_s} outside lattice range [{lo}, {hi}]")]
    OutOfRange { log_s: f64, lo: f64, hi: f64 },
    #[error("|x| = {x_abs} exceeds L/2 = {limit}")]
    RangeViolation { x_abs: f64, limit: f64 },
    #[error("risk-neutral probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("correlation matrix is not positive semidefinite (pivot {0:e})")]
    CholeskyFailure(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl PricingError {
    /// True for errors that signal poor numerical quality rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            PricingError::ImagResidualTooLarge { .. }
                | PricingError::TooManyClamped { .. }
                | PricingError::NoConvergence(_)
                | PricingError::NoBracket { .. }
                | PricingError::NegativeRadicand { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, PricingError>;
