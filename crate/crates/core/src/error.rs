use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {bound}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        bound: &'static str,
    },

    #[error("density is not integrable on (0,1): {0}")]
    NonIntegrable(String),

    #[error("malformed density: {0}")]
    MalformedDensity(String),

    #[error("tolerance {0:e} outside [1e-14, 1e-3]")]
    ToleranceRange(f64),

    #[error("argument out of range: {0}")]
    Argument(String),

    #[error("quadrature did not converge (estimate {estimate}, error bound {error:e})")]
    QuadratureNonConvergence { estimate: f64, error: f64 },

    #[error("reflected transform disagrees with the reflection identity by {discrepancy:e} at x = {x}")]
    Consistency { x: f64, discrepancy: f64 },

    #[error("series argument {argument} beyond the cancellation threshold {threshold}; use quadrature")]
    Cancellation { argument: f64, threshold: f64 },

    #[error("series did not terminate after {0} terms")]
    SeriesNonConvergence(usize),

    #[error("x = {x} outside the series regime (0, {limit}]; use quadrature")]
    Regime { x: f64, limit: f64 },

    #[error("z = {z} lies within {radius:e} of the pole {pole}")]
    PoleProximity { z: f64, pole: f64, radius: f64 },

    #[error("function is not finite at x = {0}")]
    NonFinite(f64),

    #[error("input sequence is not strictly increasing at index {0}")]
    Unsorted(usize),

    #[error("no prediction available: {0}")]
    NoPrediction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
