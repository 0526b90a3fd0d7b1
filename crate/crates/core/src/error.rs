use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {name}={value} outside the domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid parameter {name}={value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("adaptive quadrature did not reach tolerance {tolerance:e} on [{a}, {b}] (estimated error {estimate:e})")]
    Quadrature {
        a: f64,
        b: f64,
        tolerance: f64,
        estimate: f64,
    },
    #[error("could not bracket a root starting from {start} (last bracket [{lo}, {hi}])")]
    Bracket { start: f64, lo: f64, hi: f64 },
    #[error("root iteration did not converge after {iterations} iterations")]
    RootNotConverged { iterations: usize },
    #[error("derivative of the volatility is unavailable for this model")]
    DerivativeUnavailable,
    #[error("volatility bounds violated: sigma({x}) = {sigma} not in [{lo}, {hi}]")]
    BoundsViolated { x: f64, sigma: f64, lo: f64, hi: f64 },
    #[error("estimated volatility bounds [{lo}, {hi}] must be confirmed before use")]
    BoundsUnconfirmed { lo: f64, hi: f64 },
    #[error("expression error at column {column}: {message}")]
    Expression { column: usize, message: String },
    #[error("energy solver failed: {0}")]
    Solver(String),
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("empty sample set")]
    EmptyInput,
    #[error("replication grid too coarse: reconstruction error {error:e} exceeds {tolerance:e}")]
    GridTooCoarse { error: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
