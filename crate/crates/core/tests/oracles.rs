//! Cross-checks of the closed-form evaluators against independent numerical
//! routes: Runge-Kutta integration of the B-equation, Simpson quadrature of
//! the X-equation, and a hand-assembled Kronecker solve for realized data.

use nalgebra::DMatrix;
use vessel_core::{build_diagonal, build_realized, C64, CMatrix, FiniteVessel};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn re(v: f64) -> C64 {
    c(v, 0.0)
}

/// RK4 integration of `B' = -A B sigma2` from `B(x0) = B0`.
fn integrate_b_equation(a: &CMatrix, b0: &CMatrix, x0: f64, x1: f64, steps: usize) -> CMatrix {
    let rhs = |b: &CMatrix| {
        let mut sb = b.clone();
        sb.column_mut(0).scale_mut(0.5);
        sb.column_mut(1).scale_mut(-0.5);
        -(a * sb)
    };
    let h = (x1 - x0) / steps as f64;
    let mut b = b0.clone();
    for _ in 0..steps {
        let k1 = rhs(&b);
        let k2 = rhs(&(&b + &k1 * re(0.5 * h)));
        let k3 = rhs(&(&b + &k2 * re(0.5 * h)));
        let k4 = rhs(&(&b + &k3 * re(h)));
        b += (k1 + k2 * re(2.0) + k3 * re(2.0) + k4) * re(h / 6.0);
    }
    b
}

/// Composite-Simpson quadrature of `X(x) = X(x0) + int B sigma2 B* dy`.
fn integrate_x_equation(v: &FiniteVessel, x0: f64, x1: f64, panels: usize) -> CMatrix {
    let f = |y: f64| {
        let b = v.eval_b(y, 0.0).unwrap();
        let mut sb = b.clone();
        sb.column_mut(0).scale_mut(0.5);
        sb.column_mut(1).scale_mut(-0.5);
        sb * b.adjoint()
    };
    let mut acc = v.eval_x(x0, 0.0).unwrap();
    let h = (x1 - x0) / panels as f64;
    for p in 0..panels {
        let a = x0 + p as f64 * h;
        let m = a + 0.5 * h;
        let b = a + h;
        acc += (f(a) + f(m) * re(4.0) + f(b)) * re(h / 6.0);
    }
    acc
}

#[test]
fn general_b_matches_rk4_oracle() {
    // Nondiagonal 2x2 A: the operator-exponential columns must agree with a
    // direct integration of the B-equation.
    let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.3), c(0.4, -0.2), c(0.1, 0.5), c(1.5, 0.0)]);
    let b0 = CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.5), c(0.2, 0.1), re(-1.0)]);
    // X0 from the Lyapunov equation so the construction is accepted.
    let x0 = sylvester_oracle(&a, &(-(&b0 * b0.adjoint())));
    let v = build_realized(a.clone(), b0.clone(), x0, 0.0).expect("valid scattering data");

    let x_target = 0.8;
    let oracle = integrate_b_equation(&a, &b0, 0.0, x_target, 4000);
    let closed = v.eval_b(x_target, 0.0).unwrap();
    let err = (closed - oracle).norm();
    assert!(err < 1e-10, "closed-form B deviates from RK4 oracle by {err:.3e}");
}

#[test]
fn scalar_general_b_equals_diagonal_evaluation() {
    // A = [1] with B0 = [1, 1]: exp of a 1x1 matrix is the scalar exponential,
    // so the general evaluation must reproduce the mu = 1/2 diagonal one.
    let a = CMatrix::from_row_slice(1, 1, &[re(1.0)]);
    let b0 = CMatrix::from_row_slice(1, 2, &[re(1.0), re(1.0)]);
    let x0 = CMatrix::from_row_slice(1, 1, &[re(-1.0)]);
    let g = build_realized(a, b0, x0, 0.0).unwrap();
    for &x in &[-1.0, 0.3, 2.0] {
        let b = g.eval_b(x, 0.0).unwrap();
        assert!((b[(0, 0)] - re((-0.5 * x).exp())).norm() < 1e-13);
        assert!((b[(0, 1)] - re((0.5 * x).exp())).norm() < 1e-13);
    }
}

#[test]
fn diagonal_x_matches_quadrature_oracle() {
    let v = build_diagonal(
        &[re(0.5), c(0.9, 0.1)],
        &[re(1.0), c(0.3, -0.4)],
        &[re(1.0), re(-1.0)],
        0.0,
    )
    .unwrap();
    let x_target = 1.1;
    let oracle = integrate_x_equation(&v, 0.0, x_target, 600);
    let closed = v.eval_x(x_target, 0.0).unwrap();
    let err = (closed - oracle).norm();
    assert!(err < 1e-9, "closed-form X deviates from quadrature oracle by {err:.3e}");
}

/// Independent dense solve of `A X + X A* = C` by explicit Kronecker
/// assembly, written without reference to the library path.
fn sylvester_oracle(a: &CMatrix, c_rhs: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut big = DMatrix::<C64>::zeros(n * n, n * n);
    // vec(AX): block-diagonal copies of A. vec(X A*): conj(A) (x) I.
    for col_block in 0..n {
        for i in 0..n {
            for j in 0..n {
                big[(col_block * n + i, col_block * n + j)] += a[(i, j)];
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let factor = a[(j, i)].conj(); // (A*)_{ij} transposed into the Kronecker slot
            for k in 0..n {
                big[(j * n + k, i * n + k)] += factor;
            }
        }
    }
    let rhs = DMatrix::from_column_slice(n * n, 1, c_rhs.as_slice());
    let sol = big.lu().solve(&rhs).expect("oracle system solvable");
    DMatrix::from_column_slice(n, n, sol.as_slice())
}

#[test]
fn realized_accepts_sylvester_oracle_data_and_reproduces_it() {
    // Random-ish 4x4 Hurwitz-shifted A (spelled out so the test is
    // deterministic), B0 dense, X0 from the oracle solve.
    let a_raw = CMatrix::from_row_slice(
        4,
        4,
        &[
            c(0.2, 0.4), c(-0.3, 0.1), c(0.5, -0.2), c(0.0, 0.3),
            c(0.1, -0.5), c(0.6, 0.2), c(-0.4, 0.0), c(0.2, 0.2),
            c(-0.2, 0.3), c(0.4, -0.1), c(0.3, 0.5), c(-0.1, -0.4),
            c(0.5, 0.0), c(-0.2, -0.3), c(0.1, 0.4), c(0.7, -0.2),
        ],
    );
    let shift = a_raw.norm() + 0.5;
    let a = &a_raw - CMatrix::identity(4, 4) * re(shift);
    let b0 = CMatrix::from_row_slice(
        4,
        2,
        &[
            re(1.0), c(0.2, 0.5),
            c(-0.7, 0.1), re(0.4),
            c(0.3, -0.3), c(0.8, 0.2),
            re(-0.5), c(0.1, 0.6),
        ],
    );
    let x0 = sylvester_oracle(&a, &(-(&b0 * b0.adjoint())));

    let v = build_realized(a, b0.clone(), x0.clone(), 0.0).expect("oracle data is valid");
    let state = v.state(0.0, 0.0).unwrap();
    let rel = (state.x_op() - &x0).norm() / x0.norm();
    assert!(rel <= 1e-12, "X(x0,0) deviates from stored X0 by relative {rel:.3e}");
    assert_eq!(state.b(), &b0);
}
