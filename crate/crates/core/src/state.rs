//! Operators frozen at one `(x, t)` and the derived 2x2 quantities.

use nalgebra::{DMatrix, FullPivLU};

use crate::error::{Result, VesselError};
use crate::params::sigma2;
use crate::{C64, CMatrix, CMatrix2, SINGULAR_REL_TOL};

/// All vessel operators at a fixed `(x, t)`, with validity diagnostics.
///
/// A `VesselState` can only be obtained when `X` passed the rank-revealing
/// solvability test, so the derived quantities (`beta`, `gamma_star`,
/// moments, transfer values) are total on this type.
///
/// `X` is factored once with full pivoting; the pivot magnitudes provide the
/// rank decision and the condition estimate, and the factorization backs all
/// `X^{-1}` applications.
#[derive(Debug, Clone)]
pub struct VesselState {
    x: f64,
    t: f64,
    a: CMatrix,
    b: CMatrix,
    x_op: CMatrix,
    cond_x: f64,
    hermiticity_defect: f64,
    lu: FullPivLU<C64, nalgebra::Dyn, nalgebra::Dyn>,
}

/// `(min |u_ii|, max |u_ii|)` of a full-pivoted factorization.
fn pivot_range(lu: &FullPivLU<C64, nalgebra::Dyn, nalgebra::Dyn>, n: usize) -> (f64, f64) {
    let u = lu.u();
    let mut min_p = f64::INFINITY;
    let mut max_p = 0.0f64;
    for i in 0..n {
        let p = u[(i, i)].norm();
        min_p = min_p.min(p);
        max_p = max_p.max(p);
    }
    (min_p, max_p)
}

impl VesselState {
    /// Bundle operators at `(x, t)`, computing the condition estimate and the
    /// hermiticity defect. Fails when `X` is numerically singular.
    pub fn assemble(a: CMatrix, b: CMatrix, x_op: CMatrix, x: f64, t: f64) -> Result<Self> {
        let n = x_op.nrows();
        let lu = x_op.clone().full_piv_lu();
        let (min_p, max_p) = pivot_range(&lu, n);
        if !(min_p > SINGULAR_REL_TOL * max_p) || max_p == 0.0 {
            return Err(VesselError::SingularX { x, t });
        }
        let cond_x = max_p / min_p;
        let hermiticity_defect = (&x_op - x_op.adjoint()).norm();
        Ok(Self { x, t, a, b, x_op, cond_x, hermiticity_defect, lu })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn x_op(&self) -> &CMatrix {
        &self.x_op
    }

    /// Pivot-ratio condition estimate of `X` from the same factorization
    /// that vetted it.
    pub fn cond_x(&self) -> f64 {
        self.cond_x
    }

    /// `norm(X - X*)`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.hermiticity_defect
    }

    /// `X^{-1} rhs` through the stored factorization.
    pub fn solve_x(&self, rhs: &CMatrix) -> CMatrix {
        self.lu.solve(rhs).expect("invertibility vetted at assembly")
    }

    /// The Markov moment `H_n = B* X^{-1} A^n B`, built by repeated
    /// multiplication (no eigendecomposition).
    pub fn moment(&self, n: usize) -> CMatrix2 {
        let mut z = self.b.clone();
        for _ in 0..n {
            z = &self.a * z;
        }
        let h = self.b.adjoint() * self.solve_x(&z);
        to_2x2(&h)
    }

    /// Moments `H_0 ..= H_n_max` sharing one factorization pass.
    pub fn moments(&self, n_max: usize) -> Vec<CMatrix2> {
        let mut out = Vec::with_capacity(n_max + 1);
        let mut z = self.b.clone();
        for _ in 0..=n_max {
            let h = self.b.adjoint() * self.solve_x(&z);
            out.push(to_2x2(&h));
            z = &self.a * z;
        }
        out
    }

    /// `beta = [H_0]_{12}`, the constructed NLS solution at this point.
    ///
    /// Shares the `moment(0)` code path bit-for-bit.
    pub fn beta(&self) -> C64 {
        self.moment(0)[(0, 1)]
    }

    /// `gamma_star = sigma2 H_0 - H_0 sigma2`; off-diagonal `(beta, -conj(beta))`,
    /// zero diagonal.
    pub fn gamma_star(&self) -> CMatrix2 {
        let h0 = self.moment(0);
        let s2 = sigma2();
        let g = s2 * h0 - h0 * s2;
        debug_assert!(g[(0, 0)].norm() == 0.0 && g[(1, 1)].norm() == 0.0);
        debug_assert!(
            (g[(1, 0)] + g[(0, 1)].conj()).norm() <= 1e-10 * (1.0 + g.norm()),
            "gamma_star lost anti-self-adjointness"
        );
        g
    }

    /// Transfer function `S(lambda) = I - B* X^{-1} (lambda I - A)^{-1} B`.
    ///
    /// Guarded: fails when the smallest pivot of `lambda I - A` drops below
    /// `1e-8 (1 + |A|)`, i.e. `lambda` sits on the spectrum of `A`.
    pub fn transfer(&self, lambda: C64) -> Result<CMatrix2> {
        let n = self.a.nrows();
        let shifted = DMatrix::from_fn(n, n, |i, j| {
            if i == j { lambda - self.a[(i, j)] } else { -self.a[(i, j)] }
        });
        let lu = shifted.full_piv_lu();
        let (min_p, _) = pivot_range(&lu, n);
        let tol = 1e-8 * (1.0 + self.a.norm());
        if !(min_p > tol) {
            return Err(VesselError::SpectralLambda { lambda, tol });
        }
        let z = lu.solve(&self.b).expect("resolvent vetted above");
        let w = self.b.adjoint() * self.solve_x(&z);
        Ok(CMatrix2::identity() - to_2x2(&w))
    }
}

fn to_2x2(m: &CMatrix) -> CMatrix2 {
    debug_assert_eq!((m.nrows(), m.ncols()), (2, 2));
    CMatrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}
