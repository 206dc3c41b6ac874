//! Spectral data and the closed-form evaluators for `B(x,t)`, `X(x,t)`,
//! `tau(x,t)`.

use crate::error::{Result, VesselError};
use crate::linalg::{integrate_matrix, LyapunovSolver};
use crate::state::VesselState;
use crate::{C64, CMatrix};

/// Cap on the real part of any scalar exponent (and on the norm of a matrix
/// exponent). Beyond this, evaluation reports a range error instead of
/// producing infinities.
pub const EXP_CAP: f64 = 500.0;

/// `|mu_n + conj(mu_m)|` below this marks the pair `(n, m)` degenerate; the
/// corresponding entry of `X` uses the linear-in-`x` limit formula.
pub const DEGENERATE_TOL: f64 = 1e-10;

/// Relative singular-value threshold of the rank-revealing solvability test:
/// `X` is declared singular when `s_min <= SINGULAR_REL_TOL * s_max`.
pub const SINGULAR_REL_TOL: f64 = 1e-12;

/// Error tolerance of the adaptive-quadrature fallback for general vessels
/// with degenerate spectrum.
const QUADRATURE_TOL: f64 = 1e-10;

/// How `X(x,t)` is produced for a general-kind vessel.
#[derive(Debug, Clone)]
pub(crate) enum GeneralSolver {
    /// `A X + X A* = -B B*` has a unique solution; factored once.
    Sylvester(Box<LyapunovSolver>),
    /// Degenerate spectrum: integrate the X-equations from `X0`.
    Quadrature,
    /// Degenerate spectrum and the fallback was disabled.
    Disabled,
}

/// The stored spectral data of a vessel.
#[derive(Debug, Clone)]
pub enum VesselKind {
    /// `A = diag(2 mu_k)` with coupling rows `(b1_k, b2_k)`; every evaluator
    /// is entrywise explicit.
    Diagonal { mu: Vec<C64>, b1: Vec<C64>, b2: Vec<C64> },
    /// Realized data `(A, B0, X0)` satisfying the base-point Lyapunov
    /// equation; `B` evolves by column-wise operator exponentials and `X`
    /// by a Sylvester solve (or quadrature when the spectrum is degenerate).
    General { a: CMatrix, b0: CMatrix, x0_op: CMatrix },
}

/// A finite-dimensional NLS vessel frozen at its spectral data.
///
/// Immutable after construction; all evaluators are pure functions of
/// `(self, x, t)`, so concurrent evaluation needs no synchronization.
#[derive(Debug, Clone)]
pub struct FiniteVessel {
    kind: VesselKind,
    base_x: f64,
    degenerate_pairs: Vec<(usize, usize)>,
    /// `(min |mu_k|, max |mu_k|)` for diagonal data.
    mu_bounds: Option<(f64, f64)>,
    /// X-solver policy; only populated for general data.
    solver: Option<GeneralSolver>,
}

impl FiniteVessel {
    /// Assemble a diagonal vessel without any validity checks.
    ///
    /// Prefer [`crate::build::build_diagonal`]; this constructor exists for
    /// synthetic data in tests and for wrapping pre-validated data.
    pub fn diagonal_unchecked(mu: Vec<C64>, b1: Vec<C64>, b2: Vec<C64>, base_x: f64) -> Self {
        let n = mu.len();
        let mut degenerate_pairs = Vec::new();
        for row in 0..n {
            for col in 0..n {
                if (mu[row] + mu[col].conj()).norm() < DEGENERATE_TOL {
                    degenerate_pairs.push((row, col));
                }
            }
        }
        let mu_bounds = mu
            .iter()
            .map(|m| m.norm())
            .fold(None, |acc: Option<(f64, f64)>, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            });
        Self {
            kind: VesselKind::Diagonal { mu, b1, b2 },
            base_x,
            degenerate_pairs,
            mu_bounds,
            solver: None,
        }
    }

    /// Assemble a general vessel without the scattering-data checks.
    pub fn general_unchecked(
        a: CMatrix,
        b0: CMatrix,
        x0_op: CMatrix,
        base_x: f64,
        quadrature_fallback: bool,
    ) -> Self {
        let solver = match LyapunovSolver::try_new(&a) {
            Some(s) => GeneralSolver::Sylvester(Box::new(s)),
            None if quadrature_fallback => GeneralSolver::Quadrature,
            None => GeneralSolver::Disabled,
        };
        Self {
            kind: VesselKind::General { a, b0, x0_op },
            base_x,
            degenerate_pairs: Vec::new(),
            mu_bounds: None,
            solver: Some(solver),
        }
    }

    /// Re-decide the degenerate-spectrum policy of a general vessel.
    pub fn with_quadrature_fallback(mut self, enabled: bool) -> Self {
        if let Some(solver) = &mut self.solver {
            if !matches!(solver, GeneralSolver::Sylvester(_)) {
                *solver = if enabled { GeneralSolver::Quadrature } else { GeneralSolver::Disabled };
            }
        }
        self
    }

    pub fn kind(&self) -> &VesselKind {
        &self.kind
    }

    pub fn n_dim(&self) -> usize {
        match &self.kind {
            VesselKind::Diagonal { mu, .. } => mu.len(),
            VesselKind::General { a, .. } => a.nrows(),
        }
    }

    /// The base point `x0` all closed forms are measured from.
    pub fn base_point(&self) -> f64 {
        self.base_x
    }

    /// Index pairs `(n, m)` with `mu_n + conj(mu_m)` below [`DEGENERATE_TOL`].
    pub fn degenerate_pairs(&self) -> &[(usize, usize)] {
        &self.degenerate_pairs
    }

    /// `(min |mu_k|, max |mu_k|)` for diagonal data, `None` otherwise.
    pub fn mu_bounds(&self) -> Option<(f64, f64)> {
        self.mu_bounds
    }

    /// The main operator `A` as a dense matrix (`diag(2 mu)` for diagonal data).
    pub fn a_matrix(&self) -> CMatrix {
        match &self.kind {
            VesselKind::Diagonal { mu, .. } => {
                let n = mu.len();
                CMatrix::from_fn(n, n, |i, j| if i == j { 2.0 * mu[i] } else { C64::ZERO })
            }
            VesselKind::General { a, .. } => a.clone(),
        }
    }

    /// Frobenius norm of `A`.
    pub fn a_norm(&self) -> f64 {
        self.a_matrix().norm()
    }

    /// `B(x, t)`, an `n x 2` matrix.
    ///
    /// Diagonal data: row `k` is
    /// `[exp(-mu_k dx - 2i mu_k^2 t) b1_k,  exp(mu_k dx + 2i mu_k^2 t) b2_k]`
    /// with `dx = x - x0`. General data: the columns are
    /// `exp(-(A dx + i A^2 t)/2) B0[:,0]` and `exp(+(A dx + i A^2 t)/2) B0[:,1]`,
    /// the closed-form solution of the two B-equations.
    pub fn eval_b(&self, x: f64, t: f64) -> Result<CMatrix> {
        let dx = x - self.base_x;
        match &self.kind {
            VesselKind::Diagonal { mu, b1, b2 } => {
                let n = mu.len();
                let mut b = CMatrix::zeros(n, 2);
                for k in 0..n {
                    let arg = -mu[k] * dx - C64::new(0.0, 2.0) * mu[k] * mu[k] * t;
                    if arg.re.abs() > EXP_CAP {
                        return Err(VesselError::ExponentOverflow {
                            index: k,
                            magnitude: arg.re.abs(),
                            cap: EXP_CAP,
                        });
                    }
                    b[(k, 0)] = arg.exp() * b1[k];
                    b[(k, 1)] = (-arg).exp() * b2[k];
                }
                Ok(b)
            }
            VesselKind::General { a, b0, .. } => {
                let arg = a * C64::new(-0.5 * dx, 0.0) + (a * a) * C64::new(0.0, -0.5 * t);
                // inf-norm bounds the growth of the exponential
                let mut worst = (0usize, 0.0f64);
                for i in 0..arg.nrows() {
                    let row_sum: f64 = (0..arg.ncols()).map(|j| arg[(i, j)].norm()).sum();
                    if row_sum > worst.1 {
                        worst = (i, row_sum);
                    }
                }
                if worst.1 > EXP_CAP {
                    return Err(VesselError::ExponentOverflow {
                        index: worst.0,
                        magnitude: worst.1,
                        cap: EXP_CAP,
                    });
                }
                let fwd = arg.exp();
                let bwd = (-arg).exp();
                let mut b = CMatrix::zeros(a.nrows(), 2);
                b.set_column(0, &(&fwd * b0.column(0)));
                b.set_column(1, &(&bwd * b0.column(1)));
                Ok(b)
            }
        }
    }

    /// `X(x, t)`, an `n x n` self-adjoint matrix.
    ///
    /// Diagonal data, non-degenerate pair `(n, m)`: with
    /// `s = mu_n + conj(mu_m)`, `w = mu_n^2 - conj(mu_m)^2` and
    /// `E = exp(-s dx - 2i w t)`,
    ///
    /// ```text
    /// X_nm = -(b1_n conj(b1_m) E + b2_n conj(b2_m) / E) / (2 s).
    /// ```
    ///
    /// Degenerate pair (`s ~ 0`):
    /// `X_nm = (b1_n conj(b1_m) - b2_n conj(b2_m)) (dx + 4i mu_n t) / 2`.
    /// Both formulas differentiate to the X-equations exactly.
    ///
    /// General data: the unique solution of `A X + X A* = -B(x,t) B(x,t)*`
    /// when the spectrum permits, else quadrature of the X-equations from `X0`.
    pub fn eval_x(&self, x: f64, t: f64) -> Result<CMatrix> {
        let dx = x - self.base_x;
        match &self.kind {
            VesselKind::Diagonal { mu, b1, b2 } => {
                let n = mu.len();
                let mut xm = CMatrix::zeros(n, n);
                for row in 0..n {
                    for col in 0..n {
                        let s = mu[row] + mu[col].conj();
                        if s.norm() < DEGENERATE_TOL {
                            let coupling = b1[row] * b1[col].conj() - b2[row] * b2[col].conj();
                            let phase = C64::new(dx, 0.0) + C64::new(0.0, 4.0) * mu[row] * t;
                            xm[(row, col)] = C64::new(0.5, 0.0) * coupling * phase;
                        } else {
                            let w = mu[row] * mu[row] - (mu[col].conj()) * (mu[col].conj());
                            let arg = -s * dx - C64::new(0.0, 2.0) * w * t;
                            if arg.re.abs() > EXP_CAP {
                                return Err(VesselError::ExponentOverflow {
                                    index: row,
                                    magnitude: arg.re.abs(),
                                    cap: EXP_CAP,
                                });
                            }
                            let e = arg.exp();
                            let num = b1[row] * b1[col].conj() * e + b2[row] * b2[col].conj() / e;
                            xm[(row, col)] = -num / (2.0 * s);
                        }
                    }
                }
                Ok(xm)
            }
            VesselKind::General { x0_op, .. } => {
                if dx == 0.0 && t == 0.0 {
                    // X(x0, 0) is the stored operator by definition.
                    return Ok(x0_op.clone());
                }
                match self.solver.as_ref().expect("general vessels carry a solver") {
                    GeneralSolver::Sylvester(solver) => {
                        let b = self.eval_b(x, t)?;
                        let rhs = -(&b * b.adjoint());
                        Ok(solver.solve(&rhs))
                    }
                    GeneralSolver::Quadrature => self.eval_x_quadrature(x, t),
                    GeneralSolver::Disabled => Err(VesselError::SingularSylvester),
                }
            }
        }
    }

    /// Quadrature route for degenerate general spectra:
    /// `X(x,t) = X0 + int_{x0}^{x} B s2 B*(y, 0) dy
    ///              + int_0^t [i A B s2 B* - i B s2 B* A*](x, s) ds`.
    fn eval_x_quadrature(&self, x: f64, t: f64) -> Result<CMatrix> {
        let VesselKind::General { a, x0_op, .. } = &self.kind else { unreachable!() };
        let n = x0_op.nrows();
        // Overflow in the integrand surfaces as a pre-flight eval_b error.
        self.eval_b(x, t)?;
        self.eval_b(x, 0.0)?;
        let b_sigma2_bstar = |xx: f64, tt: f64| {
            let b = self.eval_b(xx, tt).expect("endpoint range pre-checked");
            let mut scaled = b.clone();
            scaled.column_mut(0).scale_mut(0.5);
            scaled.column_mut(1).scale_mut(-0.5);
            // (B sigma2) B*
            scaled * b.adjoint()
        };
        let x_leg = integrate_matrix(&|y| b_sigma2_bstar(y, 0.0), self.base_x, x, QUADRATURE_TOL, (n, n));
        let i1 = C64::new(0.0, 1.0);
        let t_leg = integrate_matrix(
            &|s| {
                let m = b_sigma2_bstar(x, s);
                (a * &m) * i1 - (&m * a.adjoint()) * i1
            },
            0.0,
            t,
            QUADRATURE_TOL,
            (n, n),
        );
        Ok(x0_op + x_leg + t_leg)
    }

    /// Freeze all operators at `(x, t)` and run the solvability diagnostics.
    ///
    /// Fails with [`VesselError::SingularX`] (rather than returning NaNs)
    /// when `X` does not pass the rank-revealing test.
    pub fn state(&self, x: f64, t: f64) -> Result<VesselState> {
        let b = self.eval_b(x, t)?;
        let x_op = self.eval_x(x, t)?;
        VesselState::assemble(self.a_matrix(), b, x_op, x, t)
    }

    /// `tau(x, t) = det(X(x0, 0)^{-1} X(x, t))`, computed as a determinant
    /// ratio so that `tau(x0, 0) = 1` exactly.
    pub fn tau(&self, x: f64, t: f64) -> Result<C64> {
        let base = self
            .state(self.base_x, 0.0)
            .map_err(|_| VesselError::SingularBasePoint { x0: self.base_x })?;
        let det0 = base.x_op().clone().lu().determinant();
        let xm = self.eval_x(x, t)?;
        let det1 = xm.lu().determinant();
        Ok(det1 / det0)
    }

    /// Shorthand for `state(x, t).beta()`.
    pub fn beta_at(&self, x: f64, t: f64) -> Result<C64> {
        Ok(self.state(x, t)?.beta())
    }
}

/// `B sigma2 B*` for an already-evaluated `B` (used by residual checks).
pub fn b_sigma2_bstar(b: &CMatrix) -> CMatrix {
    let mut scaled = b.clone();
    scaled.column_mut(0).scale_mut(0.5);
    scaled.column_mut(1).scale_mut(-0.5);
    scaled * b.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn one_soliton() -> FiniteVessel {
        FiniteVessel::diagonal_unchecked(
            vec![c(0.5, 0.0)],
            vec![c(1.0, 0.0)],
            vec![c(1.0, 0.0)],
            0.0,
        )
    }

    #[test]
    fn eval_b_at_origin_is_couplings() {
        let b = one_soliton().eval_b(0.0, 0.0).unwrap();
        assert_eq!(b[(0, 0)], c(1.0, 0.0));
        assert_eq!(b[(0, 1)], c(1.0, 0.0));
    }

    #[test]
    fn eval_b_time_phase() {
        // mu = 1/2: the t-exponent is -2i mu^2 t = -i t / 2.
        let b = one_soliton().eval_b(0.0, 1.0).unwrap();
        assert_abs_diff_eq!((b[(0, 0)] - c(0.0, -0.5).exp()).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((b[(0, 1)] - c(0.0, 0.5).exp()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn eval_x_matches_cosh() {
        let v = one_soliton();
        assert_abs_diff_eq!((v.eval_x(0.0, 0.0).unwrap()[(0, 0)] - c(-1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        for &x in &[-2.0, -0.3, 0.7, 3.1] {
            let got = v.eval_x(x, 0.0).unwrap()[(0, 0)];
            assert_abs_diff_eq!((got - c(-x.cosh(), 0.0)).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn eval_x_degenerate_pair_is_linear_in_x() {
        // mu = i/2 is degenerate against itself; with b = (1, 0) the limit
        // formula gives X(x) = x/2 at t = 0.
        let v = FiniteVessel::diagonal_unchecked(vec![c(0.0, 0.5)], vec![c(1.0, 0.0)], vec![C64::ZERO], 0.0);
        assert_eq!(v.degenerate_pairs(), &[(0, 0)]);
        for &x in &[-1.0, 0.25, 2.0] {
            let got = v.eval_x(x, 0.0).unwrap()[(0, 0)];
            assert_abs_diff_eq!((got - c(0.5 * x, 0.0)).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn eval_b_overflow_guard_names_index() {
        let v = FiniteVessel::diagonal_unchecked(
            vec![c(0.5, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0); 2],
            vec![c(1.0, 0.0); 2],
            0.0,
        );
        match v.eval_b(600.0, 0.0) {
            Err(VesselError::ExponentOverflow { index, magnitude, .. }) => {
                // |mu_0 x| = 300 is still in range; mu_1 = 1 is the offender.
                assert_eq!(index, 1);
                assert!(magnitude > EXP_CAP);
            }
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn tau_is_one_at_base_point_and_cosh_elsewhere() {
        let v = one_soliton();
        assert_eq!(v.tau(0.0, 0.0).unwrap(), c(1.0, 0.0));
        for &x in &[-3.0, 0.4, 1.9] {
            let tau = v.tau(x, 0.0).unwrap();
            assert_abs_diff_eq!((tau - c(x.cosh(), 0.0)).norm(), 0.0, epsilon = 1e-12 * x.cosh());
        }
    }

    #[test]
    fn general_kind_matches_scalar_exponentials() {
        // A = [1], B0 = [1, 1]: the 1x1 operator exponential must equal the
        // diagonal evaluation with mu = 1/2.
        let a = CMatrix::from_row_slice(1, 1, &[c(1.0, 0.0)]);
        let b0 = CMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(1.0, 0.0)]);
        let x0 = CMatrix::from_row_slice(1, 1, &[c(-1.0, 0.0)]);
        let g = FiniteVessel::general_unchecked(a, b0, x0, 0.0, true);
        let d = one_soliton();
        for &(x, t) in &[(0.7, 0.0), (-1.3, 0.4), (2.0, 1.0)] {
            let bg = g.eval_b(x, t).unwrap();
            let bd = d.eval_b(x, t).unwrap();
            assert_abs_diff_eq!((bg - bd).norm(), 0.0, epsilon = 1e-12);
            let xg = g.eval_x(x, t).unwrap();
            let xd = d.eval_x(x, t).unwrap();
            assert_abs_diff_eq!((xg - xd).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn general_base_point_returns_stored_operator() {
        let a = CMatrix::from_row_slice(1, 1, &[c(1.0, 0.0)]);
        let b0 = CMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(1.0, 0.0)]);
        let x0 = CMatrix::from_row_slice(1, 1, &[c(-1.0, 0.0)]);
        let g = FiniteVessel::general_unchecked(a, b0, x0.clone(), 0.0, true);
        assert_eq!(g.eval_x(0.0, 0.0).unwrap(), x0);
    }

    #[test]
    fn degenerate_general_without_fallback_is_configuration_error() {
        // A = [i] has i + conj(i) = 0.
        let a = CMatrix::from_row_slice(1, 1, &[c(0.0, 1.0)]);
        let b0 = CMatrix::zeros(1, 2);
        let x0 = CMatrix::identity(1, 1);
        let g = FiniteVessel::general_unchecked(a, b0, x0, 0.0, false);
        match g.eval_x(1.0, 0.0) {
            Err(VesselError::SingularSylvester) => {}
            other => panic!("expected SingularSylvester, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_general_quadrature_keeps_constant_x() {
        // A = [i], B0 = 0: X(x,t) = X0 = I for all (x,t).
        let a = CMatrix::from_row_slice(1, 1, &[c(0.0, 1.0)]);
        let b0 = CMatrix::zeros(1, 2);
        let x0 = CMatrix::identity(1, 1);
        let g = FiniteVessel::general_unchecked(a, b0, x0.clone(), 0.0, true);
        let xm = g.eval_x(1.3, 0.6).unwrap();
        assert_abs_diff_eq!((xm - x0).norm(), 0.0, epsilon = 1e-12);
    }
}
