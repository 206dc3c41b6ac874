//! Constructors turning spectral data into vessels.
//!
//! Three recipes: a discrete spectrum (`A = diag(2 mu_k)`), a spectrum on a
//! bounded curve reduced by Nystrom quadrature to the discrete case, and
//! realized transfer-function data `(A, B0, X0)`.

use std::f64::consts::PI;

use crate::error::{Result, VesselError};
use crate::vessel::FiniteVessel;
use crate::{C64, CMatrix};

/// Nodes on opposite sides of the reflected curve `-conj(Gamma)` must stay
/// at least this far apart.
const DISJOINT_TOL: f64 = 1e-8;

const HERM_TOL_COEFF: f64 = 1e-10;
const LYAP_TOL_COEFF: f64 = 1e-9;

/// Build a diagonal vessel from a bounded, separated-from-zero spectrum
/// `{mu_k}` and coupling sequences with `|b1_k| + |b2_k| != 0`.
///
/// Degenerate pairs (`mu_n + conj(mu_m) ~ 0`) are recorded on the vessel; the
/// construction fails if `X(x0, 0)` does not pass the solvability test.
pub fn build_diagonal(mu: &[C64], b1: &[C64], b2: &[C64], x0: f64) -> Result<FiniteVessel> {
    if mu.is_empty() {
        return Err(VesselError::InvalidData("empty spectrum".into()));
    }
    if mu.len() != b1.len() || mu.len() != b2.len() {
        return Err(VesselError::InvalidData(format!(
            "length mismatch: {} mu values vs {} / {} couplings",
            mu.len(),
            b1.len(),
            b2.len()
        )));
    }
    for (k, m) in mu.iter().enumerate() {
        if !(m.norm() > 0.0) {
            return Err(VesselError::InvalidData(format!(
                "mu[{k}] = 0 violates the separated-from-zero requirement"
            )));
        }
        if !m.is_finite() {
            return Err(VesselError::InvalidData(format!("mu[{k}] is not finite")));
        }
    }
    for k in 0..mu.len() {
        if b1[k].norm() + b2[k].norm() == 0.0 {
            return Err(VesselError::InvalidData(format!(
                "coupling row {k} is zero: |b1| + |b2| must not vanish"
            )));
        }
    }
    let v = FiniteVessel::diagonal_unchecked(mu.to_vec(), b1.to_vec(), b2.to_vec(), x0);
    v.state(x0, 0.0).map_err(|_| VesselError::SingularBasePoint { x0 })?;
    Ok(v)
}

/// Parameterized families of bounded curves for the spectrum.
#[derive(Debug, Clone)]
pub enum CurveFamily {
    /// Straight segment from `start` to `end`, parameter in `[0, 1]`.
    Segment { start: C64, end: C64 },
    /// `center + radius exp(i angle)`, parameter the angle.
    CircularArc { center: C64, radius: f64, angle_start: f64, angle_end: f64 },
    /// Polyline through sample nodes, uniform parameter in `[0, 1]`.
    Samples { nodes: Vec<C64> },
}

/// A bounded continuous curve `Gamma = { mu(s) : s in [a, b] }`.
#[derive(Debug, Clone)]
pub struct CurveSpec {
    pub family: CurveFamily,
    pub param_start: f64,
    pub param_end: f64,
}

impl CurveSpec {
    pub fn segment(start: C64, end: C64) -> Self {
        Self { family: CurveFamily::Segment { start, end }, param_start: 0.0, param_end: 1.0 }
    }

    pub fn circular_arc(center: C64, radius: f64, angle_start: f64, angle_end: f64) -> Self {
        Self {
            family: CurveFamily::CircularArc { center, radius, angle_start, angle_end },
            param_start: angle_start,
            param_end: angle_end,
        }
    }

    pub fn samples(nodes: Vec<C64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(VesselError::InvalidData("sampled curve needs at least 2 nodes".into()));
        }
        Ok(Self { family: CurveFamily::Samples { nodes }, param_start: 0.0, param_end: 1.0 })
    }

    /// Evaluate the parameterization `mu(s)`.
    pub fn mu(&self, s: f64) -> C64 {
        match &self.family {
            CurveFamily::Segment { start, end } => start + (end - start) * s,
            CurveFamily::CircularArc { center, radius, .. } => {
                center + C64::from_polar(*radius, s)
            }
            CurveFamily::Samples { nodes } => {
                // piecewise-linear over uniform parameter spacing on [0, 1]
                let m = nodes.len() - 1;
                let clamped = s.clamp(0.0, 1.0);
                let pos = clamped * m as f64;
                let i = (pos.floor() as usize).min(m - 1);
                let frac = pos - i as f64;
                nodes[i] + (nodes[i + 1] - nodes[i]) * frac
            }
        }
    }

    /// Check `Gamma` against `-conj(Gamma)` on the given parameter nodes:
    /// every pair must satisfy `|mu(s_i) + conj(mu(s_j))| > 1e-8`, and all
    /// values must be finite.
    pub fn check_disjoint(&self, params: &[f64]) -> Result<()> {
        let values: Vec<C64> = params.iter().map(|&s| self.mu(s)).collect();
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(VesselError::InvalidData(format!("mu(s_{i}) is not finite")));
            }
        }
        for (i, vi) in values.iter().enumerate() {
            for vj in &values {
                if (vi + vj.conj()).norm() <= DISJOINT_TOL {
                    return Err(VesselError::InvalidData(format!(
                        "curve meets its reflection -conj(Gamma) near mu = {vi} (node {i})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Quadrature nodes and positive weights on a parameter interval.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(VesselError::InvalidData("quadrature nodes/weights mismatch".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(VesselError::InvalidData("quadrature weights must be positive".into()));
        }
        Ok(Self { nodes, weights })
    }

    /// The `n`-point Gauss-Legendre rule mapped to `[a, b]`.
    ///
    /// Nodes are roots of the Legendre polynomial `P_n`, found by Newton
    /// iteration from the Chebyshev initial guesses; weights are
    /// `2 / ((1 - x^2) P_n'(x)^2)` scaled to the interval.
    pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // x runs from ~+1 down to ~-1, so mid - half*x ascends over [a, b]
            nodes.push(mid - half * x);
            weights.push(half * w);
        }
        Self { nodes, weights }
    }

    /// Composite rule: `panels` contiguous Gauss-Legendre panels of
    /// `nodes_per_panel` points each.
    pub fn composite_gauss_legendre(panels: usize, nodes_per_panel: usize, a: f64, b: f64) -> Self {
        assert!(panels >= 1);
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let panel = Self::gauss_legendre(nodes_per_panel, lo, lo + width);
            nodes.extend(panel.nodes);
            weights.extend(panel.weights);
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nystrom reduction of the curve construction: the quadrature nodes become a
/// diagonal spectrum with couplings scaled by `sqrt(w_j)`, which makes the
/// discrete `X` entries exactly the quadrature of the curve kernel.
///
/// The base point is `x0 = 0`, as in the underlying curve construction. The
/// vessel conditions hold entrywise for any node count, but no base-point
/// solvability check is made here: the continuum `X` is a compact integral
/// operator, so fine discretizations of widely separated curves are
/// legitimately ill-conditioned and state evaluation reports singularity
/// lazily where the rank test fails.
pub fn build_curve<F1, F2>(
    curve: &CurveSpec,
    b1_fn: F1,
    b2_fn: F2,
    rule: &QuadratureRule,
) -> Result<FiniteVessel>
where
    F1: Fn(C64) -> C64,
    F2: Fn(C64) -> C64,
{
    if rule.is_empty() {
        return Err(VesselError::InvalidData("empty quadrature rule".into()));
    }
    curve.check_disjoint(&rule.nodes)?;
    let mut mu = Vec::with_capacity(rule.len());
    let mut b1 = Vec::with_capacity(rule.len());
    let mut b2 = Vec::with_capacity(rule.len());
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        let m = curve.mu(s);
        if !(m.norm() > 0.0) {
            return Err(VesselError::InvalidData(format!(
                "curve passes through zero at parameter {s}"
            )));
        }
        let sw = w.sqrt();
        mu.push(m);
        b1.push(b1_fn(m) * sw);
        b2.push(b2_fn(m) * sw);
    }
    for (k, (v1, v2)) in b1.iter().zip(&b2).enumerate() {
        if v1.norm() + v2.norm() == 0.0 {
            return Err(VesselError::InvalidData(format!(
                "couplings vanish simultaneously at node {k}"
            )));
        }
    }
    Ok(FiniteVessel::diagonal_unchecked(mu, b1, b2, 0.0))
}

/// Build a general vessel from realized data `(A, B0, X0)` at base point `x0`.
///
/// Requires `X0` self-adjoint, invertible, and the base-point Lyapunov
/// equation `A X0 + X0 A* + B0 B0* = 0` within tolerance; these are exactly
/// the hypotheses under which the evolved collection is a vessel.
pub fn build_realized(a: CMatrix, b0: CMatrix, x0_op: CMatrix, x0: f64) -> Result<FiniteVessel> {
    let n = a.nrows();
    if a.ncols() != n || n == 0 {
        return Err(VesselError::InvalidData("A must be square and nonempty".into()));
    }
    if b0.nrows() != n || b0.ncols() != 2 {
        return Err(VesselError::InvalidData(format!(
            "B0 must be {n} x 2, got {} x {}",
            b0.nrows(),
            b0.ncols()
        )));
    }
    if x0_op.nrows() != n || x0_op.ncols() != n {
        return Err(VesselError::InvalidData(format!(
            "X0 must be {n} x {n}, got {} x {}",
            x0_op.nrows(),
            x0_op.ncols()
        )));
    }
    let herm = (&x0_op - x0_op.adjoint()).norm();
    if herm > HERM_TOL_COEFF * (1.0 + x0_op.norm()) {
        return Err(VesselError::InvalidData(format!(
            "X0 is not self-adjoint: defect {herm:.3e}"
        )));
    }
    let lyap = (&a * &x0_op + &x0_op * a.adjoint() + &b0 * b0.adjoint()).norm();
    let tol = LYAP_TOL_COEFF * (1.0 + x0_op.norm());
    if lyap > tol {
        return Err(VesselError::LyapunovViolation { residual: lyap, tol });
    }
    let v = FiniteVessel::general_unchecked(a, b0, x0_op, x0, true);
    v.state(x0, 0.0).map_err(|_| VesselError::SingularBasePoint { x0 })?;
    Ok(v)
}
