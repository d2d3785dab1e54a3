//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The exponent of the equation is outside the supported range.
    #[error("unsupported exponent ell = {0}: need a finite real ell > -2")]
    InvalidEll(f64),

    /// An argument fell outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Gamma function evaluated at a nonpositive integer.
    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),

    /// Hypergeometric evaluation did not reach tolerance within the
    /// iteration cap.
    #[error("hypergeometric evaluation did not converge: {0}")]
    NonConvergence(String),

    /// A parameter combination the crate deliberately does not handle.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The kernel base (phi(t)+phi(b))^2 - r^2 vanished or turned negative.
    #[error("kernel singularity: (phi(t)+phi(b))^2 - r^2 = {0}")]
    KernelSingularity(f64),

    /// A quadrature finished below its requested accuracy; the best
    /// estimate is carried along.
    #[error("quadrature tolerance not met: value {value}, estimated error {est_error}")]
    ToleranceNotMet { value: f64, est_error: f64 },

    /// Explicit finite-difference scheme would be unstable.
    #[error("CFL violation: dt = {dt} exceeds limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    /// Adaptive ODE integration drove the step below the minimum.
    #[error("step size underflow near t = {0}")]
    StepSizeUnderflow(f64),

    /// Grid construction rejected its inputs.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Catch-all for invalid caller input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
