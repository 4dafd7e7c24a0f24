use thiserror::Error;

use crate::quadrature::QuadResult;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gamma function pole at x = {0}")]
    Pole(f64),

    #[error("gamma function overflows at x = {0}")]
    Overflow(f64),

    #[error("beta function domain error: a = {a}, b = {b} (both must be positive)")]
    BetaDomain { a: f64, b: f64 },

    #[error("integrand returned NaN at x = {x}")]
    NanAt { x: f64 },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error(
        "quadrature did not converge: value {} ± {} after {} evaluations",
        .0.value, .0.abs_error_estimate, .0.evaluations
    )]
    NotConverged(QuadResult),

    #[error("custom weight `{0}` has no declared singularity exponent")]
    UnknownExponent(String),

    #[error("operator norm is infinite at p = {p}")]
    InfiniteNorm { p: f64 },

    #[error("empty support intersection: ({a_lo}, {a_hi}) ∩ ({b_lo}, {b_hi})")]
    EmptySupport { a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64 },

    #[error("p-grid [{lo}, {hi}] is not inside the support ({a}, {b})")]
    GridOutsideSupport { lo: f64, hi: f64, a: f64, b: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True when the failure is numerical non-convergence rather than bad input.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, Error::NotConverged(_) | Error::NanAt { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
