//! Finite-dimensional NLS vessels.
//!
//! A vessel is a collection of operators `(A, B(x,t), X(x,t))` together with
//! the constant signature matrices `(sigma1, sigma2, gamma)` satisfying the
//! coupled conditions
//!
//! ```text
//! B_x = -A B sigma2                X_x = B sigma2 B*
//! B_t = i A B_x                    X_t = i A B sigma2 B* - i B sigma2 B* A*
//! A X + X A* + B B* = 0            X = X*
//! ```
//!
//! From the operators one reads off the transfer function
//! `S(lambda,x) = I - B* X^{-1} (lambda I - A)^{-1} B`, the tau-function
//! `tau = det(X(x0)^{-1} X(x))` and the beta-function
//! `beta = [B* X^{-1} B]_{12}`, which solves the focusing cubic Schroedinger
//! equation `i b_t + b_xx + 2|b|^2 b = 0`.
//!
//! All operators here act on a finite-dimensional space, so every evaluation
//! reduces to dense complex linear algebra, and `B`, `X` have closed forms in
//! `(x, t)`: exponentials for diagonal spectral data, operator exponentials
//! plus a Lyapunov solve for general realized data. Evaluation at distinct
//! `(x, t)` is embarrassingly parallel; grid sweeps go through [`beta_field`]
//! which fans out with rayon when the `parallel` feature (default) is on and
//! falls back to the serial kernel otherwise.

// Guards of the form `!(x > 0.0)` are NaN-rejecting on purpose; the
// suggested `x <= 0.0` would wave NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod build;
pub mod error;
pub mod exec;
pub mod field;
pub mod linalg;
pub mod params;
pub mod state;
pub mod vessel;

pub use build::{build_curve, build_diagonal, build_realized, CurveFamily, CurveSpec, QuadratureRule};
pub use error::{Result, VesselError};
pub use field::{beta_field, beta_field_serial, BetaField, EvalGrid};
pub use params::{make_params, VesselParams};
pub use state::VesselState;
pub use vessel::{FiniteVessel, VesselKind, DEGENERATE_TOL, EXP_CAP, SINGULAR_REL_TOL};

/// Double-precision complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix with runtime dimensions.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// 2x2 complex matrix (values of transfer functions, moments, gamma-star).
pub type CMatrix2 = nalgebra::Matrix2<C64>;
