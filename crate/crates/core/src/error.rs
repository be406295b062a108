use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid nonlinearity: {0}")]
    InvalidSpec(String),

    #[error("tabulated nonlinearity queried at t = {t}, outside the knot range [0, {max}]")]
    ExtrapolationRefused { t: f64, max: f64 },

    #[error("quadrature did not converge on [{a}, {b}]: estimates {coarse} and {fine} differ")]
    Quadrature { a: f64, b: f64, coarse: f64, fine: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("shape mismatch: expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("cannot place {requested} disjoint bumps on this grid (at most {max} fit)")]
    Capacity { requested: usize, max: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("descent did not converge after {iterations} iterations (residual {residual:e}): {reason}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        reason: String,
    },
}
