use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("component {index} is outside the domain of the map: {value}")]
    OutOfDomain { index: usize, value: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("bracket [{lo}, {hi}] does not enclose the root (mass {mass_lo} at lo, {mass_hi} at hi)")]
    BadBracket { lo: f64, hi: f64, mass_lo: f64, mass_hi: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}
