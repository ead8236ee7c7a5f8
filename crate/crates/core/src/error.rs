//! Error type shared by all solver components.

use alloc::boxed::Box;

/// Errors reported by model construction, linear operators, proximal maps,
/// weight updates, and the solver loop.
///
/// Numerical degradation during iteration (divergence, overflow of the
/// objective) is *not* an error: the solver reports it through
/// [`crate::model::Termination::Stalled`] instead.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoreError {
    /// A vector or matrix did not have the expected length/shape.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A scalar parameter was outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    /// `x_true` was supplied but does not reproduce the measurements.
    #[error("inconsistent instance: relative residual {residual:e} exceeds {limit:e}")]
    InconsistentInstance { residual: f64, limit: f64 },

    /// A NaN or infinity was found where a finite value is required.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    /// The measurement operator is identically zero, so no step size exists.
    #[error("zero measurement operator has no spectral norm")]
    ZeroOperator,

    /// The proximal map was called with no knots at all.
    #[error("empty knot list")]
    EmptyKnots,

    /// A per-coordinate proximal evaluation failed inside a vector call.
    #[error("prox failed at coordinate {index}: {source}")]
    ProxCoordinate {
        index: usize,
        source: Box<CoreError>,
    },
}
