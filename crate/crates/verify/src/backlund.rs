//! The transfer function as a Baecklund transformation.
//!
//! With `u(lambda, x) = (exp(lambda (x - x0)/2) c1, exp(-lambda (x - x0)/2) c2)`
//! solving the trivial input system exactly, `y = S(lambda, x) u` must solve
//! the dressed output system
//! `lambda sigma2 y - y_x + gamma_*(x) y = 0`. The residual reports the max
//! norm of that expression over a grid, with `y_x` from the 4th-order stencil.

use nalgebra::Vector2;
use vessel_core::{C64, FiniteVessel, VesselError};

use crate::checks::DEFAULT_STEP;
use crate::report::{Context, ResidualEntry, ResidualReport, Tolerances};
use crate::stencil::d1;

/// Exact input-equation solution and its mapped output samples on a grid.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    pub lambda: C64,
    pub xs: Vec<f64>,
    pub u: Vec<Vector2<C64>>,
    pub y: Vec<Vector2<C64>>,
}

/// Report plus the wave function it was computed from.
#[derive(Debug, Clone)]
pub struct BacklundCheck {
    pub report: ResidualReport,
    pub wave: WaveFunction,
}

pub fn backlund_residual(
    v: &FiniteVessel,
    lambda: C64,
    xs: &[f64],
    t: f64,
) -> Result<BacklundCheck, VesselError> {
    backlund_residual_with(v, lambda, xs, t, (C64::ONE, C64::ONE), DEFAULT_STEP, &Tolerances::default())
}

pub fn backlund_residual_with(
    v: &FiniteVessel,
    lambda: C64,
    xs: &[f64],
    t: f64,
    c: (C64, C64),
    h: f64,
    tol: &Tolerances,
) -> Result<BacklundCheck, VesselError> {
    let x0 = v.base_point();
    let u_at = |x: f64| {
        Vector2::new(
            (lambda * (0.5 * (x - x0))).exp() * c.0,
            (-lambda * (0.5 * (x - x0))).exp() * c.1,
        )
    };
    let y_at = |x: f64| -> Result<Vector2<C64>, VesselError> {
        let s = v.state(x, t)?.transfer(lambda)?;
        Ok(s * u_at(x))
    };

    let mut worst = 0.0f64;
    let mut y_mag = 0.0f64;
    let mut u_samples = Vec::with_capacity(xs.len());
    let mut y_samples = Vec::with_capacity(xs.len());
    for &x in xs {
        let state = v.state(x, t)?;
        let gamma = state.gamma_star();
        let y = y_at(x)?;
        let dy = d1(y_at, x, h)?;
        let mut res = y * (0.5 * lambda) - dy + gamma * y;
        // sigma2 = diag(1, -1)/2 acts entrywise on the first term.
        res[1] -= lambda * y[1];
        let r = res.norm();
        worst = worst.max(r);
        y_mag = y_mag.max(y.norm());
        u_samples.push(u_at(x));
        y_samples.push(y);
    }

    let an = v.a_norm();
    let scale = ((1.0 + lambda.norm() + an) / 2.0).powi(5) * (1.0 + y_mag) / 30.0;
    let threshold = tol.stencil_d1("backlund", h, scale, (1.0 + y_mag) * (1.0 + lambda.norm()));
    let entry = ResidualEntry::new(
        "backlund",
        worst,
        threshold,
        Context { t: Some(t), ..Context::default() }.with_lambda(lambda),
    );
    Ok(BacklundCheck {
        report: ResidualReport::new(vec![entry]),
        wave: WaveFunction { lambda, xs: xs.to_vec(), u: u_samples, y: y_samples },
    })
}
