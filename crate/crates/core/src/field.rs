//! Rectangular (x, t) grids and the sampled beta field.

use crate::error::{Result, VesselError};
use crate::exec::par_map_collect;
use crate::vessel::FiniteVessel;
use crate::C64;

/// A uniform rectangular evaluation grid. `nt = 1` is a stationary slice.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
}

impl EvalGrid {
    pub fn new(x_min: f64, x_max: f64, nx: usize, t_min: f64, t_max: f64, nt: usize) -> Result<Self> {
        if !(x_min < x_max) {
            return Err(VesselError::InvalidData(format!(
                "grid requires x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if nx < 2 {
            return Err(VesselError::InvalidData(format!("grid requires nx >= 2, got {nx}")));
        }
        if nt == 0 {
            return Err(VesselError::InvalidData("grid requires nt >= 1".into()));
        }
        if nt > 1 && !(t_min < t_max) {
            return Err(VesselError::InvalidData(format!(
                "grid with nt > 1 requires t_min < t_max, got [{t_min}, {t_max}]"
            )));
        }
        Ok(Self { x_min, x_max, nx, t_min, t_max, nt })
    }

    /// Stationary slice at `t`.
    pub fn stationary(x_min: f64, x_max: f64, nx: usize, t: f64) -> Result<Self> {
        Self::new(x_min, x_max, nx, t, t, 1)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    /// Grid step in t; zero for a stationary slice.
    pub fn dt(&self) -> f64 {
        if self.nt > 1 { (self.t_max - self.t_min) / (self.nt - 1) as f64 } else { 0.0 }
    }

    pub fn x_at(&self, ix: usize) -> f64 {
        self.x_min + ix as f64 * self.dx()
    }

    pub fn t_at(&self, it: usize) -> f64 {
        self.t_min + it as f64 * self.dt()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x_at(i)).collect()
    }

    pub fn ts(&self) -> Vec<f64> {
        (0..self.nt).map(|i| self.t_at(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.nx * self.nt
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `beta` sampled on a grid. Nodes where `X` failed the solvability test (or
/// an evaluator range check) are masked out, never poisoned with NaNs.
#[derive(Debug, Clone)]
pub struct BetaField {
    grid: EvalGrid,
    /// Row-major over time slices: index `it * nx + ix`.
    values: Vec<C64>,
    valid: Vec<bool>,
}

impl BetaField {
    pub fn from_parts(grid: EvalGrid, values: Vec<C64>, valid: Vec<bool>) -> Self {
        assert_eq!(values.len(), grid.len());
        assert_eq!(valid.len(), grid.len());
        Self { grid, values, valid }
    }

    pub fn grid(&self) -> &EvalGrid {
        &self.grid
    }

    #[inline]
    pub fn value(&self, ix: usize, it: usize) -> C64 {
        self.values[it * self.grid.nx + ix]
    }

    #[inline]
    pub fn is_valid(&self, ix: usize, it: usize) -> bool {
        self.valid[it * self.grid.nx + ix]
    }

    pub fn all_valid(&self) -> bool {
        self.valid.iter().all(|v| *v)
    }

    pub fn invalid_count(&self) -> usize {
        self.valid.iter().filter(|v| !**v).count()
    }

    /// One time slice as `(t, values)`.
    pub fn slice_at(&self, it: usize) -> (f64, &[C64]) {
        let nx = self.grid.nx;
        (self.grid.t_at(it), &self.values[it * nx..(it + 1) * nx])
    }
}

fn node(v: &FiniteVessel, x: f64, t: f64) -> (C64, bool) {
    match v.beta_at(x, t) {
        Ok(b) => (b, true),
        Err(_) => (C64::ZERO, false),
    }
}

/// Sample `beta` at every grid node, fanning out across nodes. Failures are
/// recorded in the mask.
pub fn beta_field(v: &FiniteVessel, g: &EvalGrid) -> BetaField {
    let nx = g.nx;
    let pairs = par_map_collect(g.len(), |idx| {
        let (it, ix) = (idx / nx, idx % nx);
        node(v, g.x_at(ix), g.t_at(it))
    });
    collect_field(g.clone(), pairs)
}

/// The sequential kernel behind [`beta_field`]; also the whole story when the
/// `parallel` feature is off. Node arithmetic is identical, so both paths
/// produce bit-identical fields.
pub fn beta_field_serial(v: &FiniteVessel, g: &EvalGrid) -> BetaField {
    let nx = g.nx;
    let pairs: Vec<(C64, bool)> = (0..g.len())
        .map(|idx| {
            let (it, ix) = (idx / nx, idx % nx);
            node(v, g.x_at(ix), g.t_at(it))
        })
        .collect();
    collect_field(g.clone(), pairs)
}

fn collect_field(grid: EvalGrid, pairs: Vec<(C64, bool)>) -> BetaField {
    let mut values = Vec::with_capacity(pairs.len());
    let mut valid = Vec::with_capacity(pairs.len());
    for (v, ok) in pairs {
        values.push(v);
        valid.push(ok);
    }
    BetaField { grid, values, valid }
}
