use crate::C64;

/// Errors produced by vessel construction and evaluation.
#[derive(Debug, Clone, thiserror::Error)]
pub enum VesselError {
    /// An exponent in a closed-form evaluator left the safe range for f64.
    #[error("exponent real part {magnitude:.3e} at index {index} exceeds the cap {cap} (evaluation point too far from the base point)")]
    ExponentOverflow { index: usize, magnitude: f64, cap: f64 },

    /// X(x, t) failed the rank-revealing solvability test: the requested
    /// point lies outside the interval of invertibility.
    #[error("operator X is numerically singular at (x, t) = ({x}, {t}): outside the interval of invertibility")]
    SingularX { x: f64, t: f64 },

    /// X(x0, 0) itself is singular, so tau and the construction are undefined.
    #[error("base-point operator X(x0, 0) is singular at x0 = {x0}")]
    SingularBasePoint { x0: f64 },

    /// lambda is too close to the spectrum of A for the resolvent to be trusted.
    #[error("lambda = {lambda} is within {tol:.3e} of the spectrum of A")]
    SpectralLambda { lambda: C64, tol: f64 },

    /// Realized data must satisfy the Lyapunov equation at the base point.
    #[error("Lyapunov residual {residual:.3e} exceeds {tol:.3e}: (A, X0, B0) is not valid scattering data")]
    LyapunovViolation { residual: f64, tol: f64 },

    /// The Sylvester operator for A is singular and the quadrature fallback
    /// was disabled when the vessel was built.
    #[error("spectrum of A meets -spectrum(A)*: the Sylvester solve is singular and the quadrature fallback is disabled")]
    SingularSylvester,

    /// Construction-time validation failure (shape, invariants, curve data).
    #[error("invalid vessel data: {0}")]
    InvalidData(String),
}

pub type Result<T> = std::result::Result<T, VesselError>;
