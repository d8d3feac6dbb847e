use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("coefficient length {found} does not match basis length {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("point y = {0} lies outside the closed strip [0, 1]")]
    OutsideStrip(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("linear system is singular")]
    SingularJacobian,
    #[error("Newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },
    #[error("Newton iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NewtonStalled { iterations: usize, residual: f64 },
    #[error("branch collapsed onto the trivial solution at step {step}")]
    CollapsedToTrivial { step: usize },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("quadrature denominator vanished at x = {x}, y = {y}")]
    VanishingDenominator { x: f64, y: f64 },
    #[error("malformed solution file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
