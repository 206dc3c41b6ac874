//! Small dense-complex helpers: a reusable Lyapunov/Sylvester solver and an
//! adaptive Simpson rule for matrix-valued integrands.

use nalgebra::DMatrix;

use crate::{C64, CMatrix};

/// Relative pivot threshold below which the Kronecker system is declared
/// singular (spectrum of A meets -spectrum(A)*).
const PIVOT_REL_TOL: f64 = 1e-12;

/// Solver for `A X + X A* = C` with fixed `A`, reused across right-hand sides.
///
/// The equation is vectorized column-major: `(I (x) A + conj(A) (x) I) vec(X)
/// = vec(C)`, and the n^2 x n^2 system is factored once with full pivoting so
/// that near-singularity (an eigenvalue pair with `l_i + conj(l_j) = 0`) is
/// detected instead of amplified.
#[derive(Debug, Clone)]
pub struct LyapunovSolver {
    lu: nalgebra::FullPivLU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    n: usize,
}

impl LyapunovSolver {
    /// Factor the Sylvester operator of `a`. Returns `None` when it is
    /// numerically singular.
    pub fn try_new(a: &CMatrix) -> Option<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "A must be square");
        let id = DMatrix::<C64>::identity(n, n);
        let m = id.kronecker(a) + a.conjugate().kronecker(&id);
        let lu = m.full_piv_lu();
        let u = lu.u();
        let mut max_piv = 0.0f64;
        let mut min_piv = f64::INFINITY;
        for i in 0..n * n {
            let p = u[(i, i)].norm();
            max_piv = max_piv.max(p);
            min_piv = min_piv.min(p);
        }
        if !(min_piv > PIVOT_REL_TOL * max_piv) {
            return None;
        }
        Some(Self { lu, n })
    }

    /// Solve `A X + X A* = C`.
    pub fn solve(&self, c: &CMatrix) -> CMatrix {
        debug_assert_eq!(c.nrows(), self.n);
        debug_assert_eq!(c.ncols(), self.n);
        let rhs = DMatrix::from_column_slice(self.n * self.n, 1, c.as_slice());
        let sol = self
            .lu
            .solve(&rhs)
            .expect("factorization vetted at construction");
        DMatrix::from_column_slice(self.n, self.n, sol.as_slice())
    }
}

/// Adaptive Simpson quadrature of a matrix-valued integrand, error controlled
/// in the max-abs entry norm. Returns the zero matrix for an empty interval.
pub fn integrate_matrix<F>(f: &F, a: f64, b: f64, tol: f64, shape: (usize, usize)) -> CMatrix
where
    F: Fn(f64) -> CMatrix,
{
    if a == b {
        return CMatrix::zeros(shape.0, shape.1);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(&fa, &fm, &fb, b - a);
    adaptive(f, a, b, &fa, &fm, &fb, &whole, tol, 30)
}

fn simpson(fa: &CMatrix, fm: &CMatrix, fb: &CMatrix, h: f64) -> CMatrix {
    let c = C64::new(h / 6.0, 0.0);
    (fa + fm * C64::new(4.0, 0.0) + fb) * c
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: &CMatrix,
    fm: &CMatrix,
    fb: &CMatrix,
    whole: &CMatrix,
    tol: f64,
    depth: u32,
) -> CMatrix
where
    F: Fn(f64) -> CMatrix,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, &flm, fm, m - a);
    let right = simpson(fm, &frm, fb, b - m);
    let refined = &left + &right;
    let err = max_abs(&(&refined - whole)) / 15.0;
    if depth == 0 || err <= tol {
        // Richardson end-correction of the composite estimate.
        return &refined + (&refined - whole) / C64::new(15.0, 0.0);
    }
    adaptive(f, a, m, fa, &flm, fm, &left, 0.5 * tol, depth - 1)
        + adaptive(f, m, b, fm, &frm, fb, &right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lyapunov_solver_roundtrip() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.2), c(0.3, -0.1), c(0.0, 0.5), c(2.0, -0.4)],
        );
        let x_true =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.2, 0.7), c(0.2, -0.7), c(-3.0, 0.0)]);
        let rhs = &a * &x_true + &x_true * a.adjoint();
        let solver = LyapunovSolver::try_new(&a).expect("nondegenerate spectrum");
        let x = solver.solve(&rhs);
        assert_abs_diff_eq!((x - x_true).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn lyapunov_solver_detects_degenerate_spectrum() {
        // A = diag(i): i + conj(i) = 0, so the Sylvester operator is singular.
        let a = CMatrix::from_row_slice(1, 1, &[c(0.0, 1.0)]);
        assert!(LyapunovSolver::try_new(&a).is_none());
    }

    #[test]
    fn simpson_integrates_matrix_exponential() {
        // integral of [[exp(s), 0], [0, cos(s)]] over [0, 1].
        let f = |s: f64| {
            CMatrix::from_row_slice(2, 2, &[c(s.exp(), 0.0), C64::ZERO, C64::ZERO, c(s.cos(), 0.0)])
        };
        let got = integrate_matrix(&f, 0.0, 1.0, 1e-12, (2, 2));
        assert_abs_diff_eq!(got[(0, 0)].re, 1.0f64.exp() - 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(got[(1, 1)].re, 1.0f64.sin(), epsilon = 1e-10);
        assert_abs_diff_eq!(got[(0, 1)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn empty_interval_is_exact_zero() {
        let f = |_s: f64| CMatrix::identity(3, 3);
        let got = integrate_matrix(&f, 0.7, 0.7, 1e-10, (3, 3));
        assert_eq!(got, CMatrix::zeros(3, 3));
    }
}
