//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by geometry, quadrature, kernel and analyzer operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two points of different dimension were combined.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A coordinate or parameter was NaN or infinite.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    /// A parameter violated its documented range.
    #[error("invalid parameter {name} = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Adaptive quadrature ran out of subdivisions before reaching the
    /// requested tolerance. Carries the best estimate and the error
    /// actually achieved.
    #[error("quadrature did not converge: estimate {estimate}, achieved error {achieved}, target {target}")]
    ConvergenceFailure {
        estimate: f64,
        achieved: f64,
        target: f64,
    },

    /// Kernel evaluation was refused because t^2 + |x-y|^2 is below the
    /// reliability floor for the subordination quadrature.
    #[error("kernel evaluation too close to the diagonal: t^2 + |x-y|^2 = {scale2} < {floor}")]
    NearDiagonal { scale2: f64, floor: f64 },

    /// A transform was requested for a field that fails the growth
    /// condition guaranteeing the Poisson integral exists.
    #[error("field {field} is not admissible for Poisson integration")]
    Inadmissible { field: String },

    /// A sampler produced no usable samples.
    #[error("degenerate sampler: {reason}")]
    DegenerateSampler { reason: &'static str },

    /// An empirical inequality check found LHS > 0 where RHS = 0.
    #[error("majorant violation for {bound}: LHS {lhs} > 0 with RHS = 0 at t={t}, x={x:?}, y={y:?}")]
    MajorantViolation {
        bound: &'static str,
        lhs: f64,
        t: f64,
        x: Vec<f64>,
        y: Vec<f64>,
    },

    /// More than the allowed fraction of certification samples had to be
    /// skipped because their kernel quadrature failed.
    #[error("too many skipped samples during certification: {skipped} of {total}")]
    TooManySkips { skipped: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
