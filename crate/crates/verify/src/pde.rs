//! The Schroedinger residual of a sampled beta field.

use vessel_core::{BetaField, C64, VesselError};

/// `|i b_t + b_xx + 2 |b|^2 b|` at interior grid nodes, 4th-order stencils on
/// the grid's own steps. `values` is NaN where a node was not evaluated
/// (edges, or a masked node inside the stencil).
#[derive(Debug, Clone)]
pub struct PdeResidual {
    pub nx: usize,
    pub nt: usize,
    values: Vec<f64>,
    pub max: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

impl PdeResidual {
    pub fn value(&self, ix: usize, it: usize) -> f64 {
        self.values[it * self.nx + ix]
    }
}

pub fn pde_residual(field: &BetaField) -> Result<PdeResidual, VesselError> {
    let g = field.grid();
    let (nx, nt) = (g.nx, g.nt);
    if nx < 5 || nt < 5 {
        return Err(VesselError::InvalidData(format!(
            "pde residual needs nx, nt >= 5 for interior stencils, got {nx} x {nt}"
        )));
    }
    let dx = g.dx();
    let dt = g.dt();
    let mut values = vec![f64::NAN; nx * nt];
    let mut max = 0.0f64;
    let mut evaluated = 0usize;
    let mut skipped = 0usize;

    for it in 2..nt - 2 {
        for ix in 2..nx - 2 {
            let stencil_ok = (-2i64..=2).all(|k| {
                field.is_valid((ix as i64 + k) as usize, it)
                    && field.is_valid(ix, (it as i64 + k) as usize)
            });
            if !stencil_ok {
                skipped += 1;
                continue;
            }
            let b = |dxi: i64, dti: i64| {
                field.value((ix as i64 + dxi) as usize, (it as i64 + dti) as usize)
            };
            let b0 = b(0, 0);
            let b_xx = (-b(-2, 0) + 16.0 * b(-1, 0) - 30.0 * b0 + 16.0 * b(1, 0) - b(2, 0))
                / (12.0 * dx * dx);
            let b_t = (b(0, -2) - 8.0 * b(0, -1) + 8.0 * b(0, 1) - b(0, 2)) / (12.0 * dt);
            let r = (C64::new(0.0, 1.0) * b_t + b_xx + 2.0 * b0.norm_sqr() * b0).norm();
            values[it * nx + ix] = r;
            max = max.max(r);
            evaluated += 1;
        }
    }
    Ok(PdeResidual { nx, nt, values, max, evaluated, skipped })
}
