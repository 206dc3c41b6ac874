//! Residual checks for the vessel identities.
//!
//! Every theorem about a vessel becomes a named residual with a pass/fail
//! threshold: the coupled B/X differential equations and the Lyapunov
//! equation, the Baecklund mapping property of the transfer function, its
//! symmetry and determinant permanency, the tau-function identities, the
//! moment recursions, and the Schroedinger equation for the sampled beta
//! field itself.
//!
//! Derivatives are always 4th-order central stencils with a step `h` that is
//! independent of any reporting grid (default `1e-3`), except for
//! [`pde_residual`] which by design differentiates the field on its own grid
//! steps. Checks that cannot be evaluated (stencil leaving the window of
//! invertibility, tau crossing zero) produce entries marked unevaluable
//! rather than NaN poisoning: such entries never pass.

mod backlund;
mod checks;
mod pde;
mod report;
mod stencil;

pub use backlund::{backlund_residual, backlund_residual_with, BacklundCheck, WaveFunction};
pub use checks::{
    moment_recursion_residual, moment_recursion_residual_with, ode_residuals, ode_residuals_with,
    spectral_identities, spectral_identities_with, tau_identity_residual,
    tau_identity_residual_with, DEFAULT_STEP,
};
pub use pde::{pde_residual, PdeResidual};
pub use report::{Context, ResidualEntry, ResidualReport, Tolerances};
