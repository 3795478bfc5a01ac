//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while constructing domain objects or
/// evaluating metrics.
///
/// Construction-time validation uses [`Error::InvalidParameter`]; runtime
/// numeric trouble is split between domain violations (caller bugs beyond the
/// fixed clamping tolerance) and convergence failures of the iterative
/// schemes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor argument violates its documented invariant.
    #[error("invalid parameter `{name}`: {reason} (got {value})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A mathematical argument is outside its domain by more than the fixed
    /// roundoff tolerance, indicating inconsistent inputs rather than noise.
    #[error("domain error in {context}: {value} is outside {expected}")]
    Domain {
        context: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// Adaptive quadrature exhausted its subdivision budget before reaching
    /// the requested tolerance.
    #[error(
        "quadrature did not converge in {context}: error estimate {error_estimate:e} \
         after {subdivisions} subdivisions"
    )]
    NoConvergence {
        context: &'static str,
        error_estimate: f64,
        subdivisions: usize,
    },

    /// A series evaluation hit its hard term cap before meeting tolerance.
    #[error("series did not converge in {context} after {terms} terms")]
    SeriesDivergence { context: &'static str, terms: usize },

    /// The integrand produced NaN/Inf away from the interval endpoints.
    #[error("non-finite integrand value in {context} at x = {x}")]
    NonFinite { context: &'static str, x: f64 },

    /// A result's error estimate exceeds the accuracy contract of the
    /// operation that produced it.
    #[error(
        "accuracy target missed in {context}: error estimate {error_estimate:e} exceeds {limit:e}"
    )]
    Accuracy {
        context: &'static str,
        error_estimate: f64,
        limit: f64,
    },

    /// Root bracketing failed (no sign change over the search interval).
    #[error("root bracketing failed in {context}")]
    Bracketing { context: &'static str },

    /// An operation that needs data received none.
    #[error("empty input in {context}")]
    Empty { context: &'static str },
}
