use std::collections::BTreeMap;

use serde::Serialize;
use vessel_core::C64;

/// Where a residual was measured. Only the applicable coordinates are set
/// (and serialized).
#[derive(Debug, Clone, Default, Serialize)]
pub struct Context {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// `[re, im]` of the spectral parameter.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Context {
    pub fn at(x: f64, t: f64) -> Self {
        Self { x: Some(x), t: Some(t), ..Self::default() }
    }

    pub fn with_lambda(mut self, lambda: C64) -> Self {
        self.lambda = Some([lambda.re, lambda.im]);
        self
    }

    pub fn with_n(mut self, n: u32) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// One named residual against its threshold. `pass` holds exactly when
/// `residual <= threshold`; an unevaluable entry carries a NaN residual and
/// therefore never passes.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualEntry {
    pub check_id: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    pub context: Context,
}

impl ResidualEntry {
    pub fn new(check_id: impl Into<String>, residual: f64, threshold: f64, context: Context) -> Self {
        Self { check_id: check_id.into(), residual, threshold, pass: residual <= threshold, context }
    }

    /// The check could not be run at this context (stencil left the validity
    /// window, tau vanished under the stencil, ...).
    pub fn unevaluable(check_id: impl Into<String>, context: Context, reason: impl Into<String>) -> Self {
        let ctx = Context { note: Some(reason.into()), ..context };
        Self { check_id: check_id.into(), residual: f64::NAN, threshold: 0.0, pass: false, context: ctx }
    }

    pub fn is_evaluable(&self) -> bool {
        !self.residual.is_nan()
    }
}

/// A list of residual entries; serializes as a JSON array of
/// `{check_id, residual, threshold, pass, context}`.
#[derive(Debug, Clone, Default, Serialize)]
#[serde(transparent)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
}

impl ResidualReport {
    pub fn new(entries: Vec<ResidualEntry>) -> Self {
        Self { entries }
    }

    pub fn push(&mut self, entry: ResidualEntry) {
        self.entries.push(entry);
    }

    pub fn merge(&mut self, other: ResidualReport) {
        self.entries.extend(other.entries);
    }

    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    /// Largest evaluable residual, NaN if nothing was evaluable.
    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.is_evaluable())
            .map(|e| e.residual)
            .fold(f64::NAN, f64::max)
    }

    pub fn unevaluable_count(&self) -> usize {
        self.entries.iter().filter(|e| !e.is_evaluable()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Threshold policy: algebraic identities scale with `1 + |X|`, stencil-based
/// identities with `h^4` times a local derivative scale, and any check id can
/// be pinned to an absolute threshold.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Coefficient of `(1 + |X|)` for algebraic identities.
    pub algebraic_coeff: f64,
    /// Coefficient of `h^4 * scale` for finite-difference identities.
    pub stencil_coeff: f64,
    /// Absolute threshold overrides by check id.
    pub overrides: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { algebraic_coeff: 1e-9, stencil_coeff: 100.0, overrides: BTreeMap::new() }
    }
}

impl Tolerances {
    /// Apply an override if one is pinned for this id.
    pub fn resolve(&self, check_id: &str, computed: f64) -> f64 {
        self.overrides.get(check_id).copied().unwrap_or(computed)
    }

    pub fn algebraic(&self, check_id: &str, x_norm: f64) -> f64 {
        self.resolve(check_id, self.algebraic_coeff * (1.0 + x_norm))
    }

    /// `stencil_coeff * h^4 * scale` plus a first-derivative roundoff floor
    /// (cancellation noise of the stencil sums grows like `eps * mag / h`).
    pub fn stencil_d1(&self, check_id: &str, h: f64, scale: f64, mag: f64) -> f64 {
        let floor = 64.0 * f64::EPSILON * mag / h;
        self.resolve(check_id, self.stencil_coeff * h.powi(4) * scale + floor)
    }

    /// As [`Self::stencil_d1`] but with the `eps * mag / h^2` floor of second
    /// derivatives.
    pub fn stencil_d2(&self, check_id: &str, h: f64, scale: f64, mag: f64) -> f64 {
        let floor = 64.0 * f64::EPSILON * mag / (h * h);
        self.resolve(check_id, self.stencil_coeff * h.powi(4) * scale + floor)
    }
}
