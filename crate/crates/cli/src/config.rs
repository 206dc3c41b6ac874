//! Run configuration: JSON schema, validation with field paths, and the
//! check registry.

use serde::{Deserialize, Serialize};
use vessel_core::{C64, EvalGrid};

use crate::expr;

/// Complex numbers are `[re, im]` pairs in the config.
pub type CJson = [f64; 2];

pub fn to_c64(v: CJson) -> C64 {
    C64::new(v[0], v[1])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub vessel: VesselConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub checks: Vec<CheckSelect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Exactly one variant must be present.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VesselConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<DiagonalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realized: Option<RealizedConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalConfig {
    pub mu: Vec<CJson>,
    pub b1: Vec<CJson>,
    pub b2: Vec<CJson>,
    #[serde(default)]
    pub x0: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    #[serde(flatten)]
    pub family: CurveFamilyConfig,
    pub b1_expr: String,
    pub b2_expr: String,
    pub quadrature_n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveFamilyConfig {
    Segment { start: CJson, end: CJson },
    CircularArc { center: CJson, radius: f64, angle_start: f64, angle_end: f64 },
    Samples { nodes: Vec<CJson> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizedConfig {
    /// Row-major n x n matrix of `[re, im]` pairs.
    #[serde(rename = "A")]
    pub a: Vec<Vec<CJson>>,
    /// Row-major n x 2.
    #[serde(rename = "B0")]
    pub b0: Vec<Vec<CJson>>,
    /// Row-major n x n.
    #[serde(rename = "X0")]
    pub x0_op: Vec<Vec<CJson>>,
    #[serde(default)]
    pub x0: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    #[serde(default)]
    pub t_min: f64,
    #[serde(default)]
    pub t_max: f64,
    #[serde(default = "one")]
    pub nt: usize,
}

fn one() -> usize {
    1
}

/// A check id, optionally with an absolute threshold override.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckSelect {
    Id(String),
    WithThreshold { id: String, threshold: f64 },
}

impl CheckSelect {
    pub fn id(&self) -> &str {
        match self {
            CheckSelect::Id(s) => s,
            CheckSelect::WithThreshold { id, .. } => id,
        }
    }

    pub fn threshold(&self) -> Option<f64> {
        match self {
            CheckSelect::Id(_) => None,
            CheckSelect::WithThreshold { threshold, .. } => Some(*threshold),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub dt: f64,
    #[serde(default = "default_padding")]
    pub padding: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
}

fn default_padding() -> f64 {
    4.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
    /// Emit the CSV artifacts (beta, tau, oracle comparison).
    #[serde(default = "yes")]
    pub csv: bool,
    /// Emit the residual JSON.
    #[serde(default = "yes")]
    pub json: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_dir(), csv: true, json: true }
    }
}

fn yes() -> bool {
    true
}

fn default_dir() -> String {
    "out".into()
}

/// Check groups: the id users select, and the residual-entry ids it covers.
pub const CHECK_GROUPS: &[(&str, &[&str])] = &[
    ("ode", &["ode-db", "ode-dx", "ode-dbt", "ode-dxt", "lyapunov"]),
    ("backlund", &["backlund"]),
    ("spectral", &["symmetry", "det-constancy"]),
    ("tau", &["tau-logderiv", "tau-curvature"]),
    (
        "moments",
        &["moment-recursion", "moment-evolution", "moment-entry-12", "moment-entry-21", "h0x-structure"],
    ),
    ("pde", &["pde"]),
];

pub fn group_entry_ids(group: &str) -> Option<&'static [&'static str]> {
    CHECK_GROUPS.iter().find(|(g, _)| *g == group).map(|(_, ids)| *ids)
}

pub fn all_group_ids() -> Vec<&'static str> {
    CHECK_GROUPS.iter().map(|(g, _)| *g).collect()
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config is not valid UTF-8")]
    Utf8(#[from] std::str::Utf8Error),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { path: path.into(), message: message.into() }
}

/// Parse and validate a JSON config. Schema violations and invariant
/// violations both come back with the offending field path.
pub fn parse_config(text: &[u8]) -> Result<RunConfig, ConfigError> {
    let text = std::str::from_utf8(text)?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    let variants: Vec<&str> = [
        cfg.vessel.diagonal.as_ref().map(|_| "diagonal"),
        cfg.vessel.curve.as_ref().map(|_| "curve"),
        cfg.vessel.realized.as_ref().map(|_| "realized"),
    ]
    .into_iter()
    .flatten()
    .collect();
    match variants.len() {
        0 => return Err(invalid("vessel", "one of {diagonal, curve, realized} must be set")),
        1 => {}
        _ => {
            return Err(invalid(
                "vessel",
                format!("exactly one variant allowed, found {}", variants.join(" and ")),
            ))
        }
    }

    if let Some(d) = &cfg.vessel.diagonal {
        if d.mu.is_empty() {
            return Err(invalid("vessel.diagonal.mu", "must not be empty"));
        }
        if d.mu.len() != d.b1.len() || d.mu.len() != d.b2.len() {
            return Err(invalid(
                "vessel.diagonal",
                format!("mu/b1/b2 lengths differ: {} / {} / {}", d.mu.len(), d.b1.len(), d.b2.len()),
            ));
        }
        for (k, m) in d.mu.iter().enumerate() {
            let norm = to_c64(*m).norm();
            if !(norm > 0.0) {
                return Err(invalid(
                    format!("vessel.diagonal.mu[{k}]"),
                    "must be separated from zero",
                ));
            }
            if !norm.is_finite() {
                return Err(invalid(format!("vessel.diagonal.mu[{k}]"), "must be finite"));
            }
        }
        for k in 0..d.mu.len() {
            if to_c64(d.b1[k]).norm() + to_c64(d.b2[k]).norm() == 0.0 {
                return Err(invalid(
                    format!("vessel.diagonal.b1[{k}]"),
                    "|b1| + |b2| must not vanish",
                ));
            }
        }
    }

    if let Some(c) = &cfg.vessel.curve {
        if c.quadrature_n == 0 {
            return Err(invalid("vessel.curve.quadrature_n", "must be at least 1"));
        }
        expr::parse(&c.b1_expr)
            .map_err(|e| invalid("vessel.curve.b1_expr", e.to_string()))?;
        expr::parse(&c.b2_expr)
            .map_err(|e| invalid("vessel.curve.b2_expr", e.to_string()))?;
        if let CurveFamilyConfig::CircularArc { radius, .. } = &c.family {
            if !(*radius > 0.0) {
                return Err(invalid("vessel.curve.params.radius", "must be positive"));
            }
        }
        if let CurveFamilyConfig::Samples { nodes } = &c.family {
            if nodes.len() < 2 {
                return Err(invalid("vessel.curve.params.nodes", "need at least 2 nodes"));
            }
        }
    }

    if let Some(r) = &cfg.vessel.realized {
        let n = r.a.len();
        if n == 0 || r.a.iter().any(|row| row.len() != n) {
            return Err(invalid("vessel.realized.A", "must be square and nonempty"));
        }
        if r.b0.len() != n || r.b0.iter().any(|row| row.len() != 2) {
            return Err(invalid("vessel.realized.B0", format!("must be {n} x 2")));
        }
        if r.x0_op.len() != n || r.x0_op.iter().any(|row| row.len() != n) {
            return Err(invalid("vessel.realized.X0", format!("must be {n} x {n}")));
        }
    }

    grid_from(&cfg.grid).map_err(|e| invalid("grid", e.to_string()))?;

    let known = all_group_ids();
    for (k, sel) in cfg.checks.iter().enumerate() {
        if !known.contains(&sel.id()) {
            return Err(invalid(
                format!("checks[{k}]"),
                format!("unknown check id '{}'; known: {}", sel.id(), known.join(", ")),
            ));
        }
        if let Some(thr) = sel.threshold() {
            if !(thr > 0.0) {
                return Err(invalid(format!("checks[{k}].threshold"), "must be positive"));
            }
        }
    }

    if let Some(o) = &cfg.oracle {
        if !(o.dt > 0.0) {
            return Err(invalid("oracle.dt", "must be positive"));
        }
        if o.padding < 4.0 {
            return Err(invalid("oracle.padding", "must be at least 4"));
        }
        if let Some(nx) = o.nx {
            if !nx.is_power_of_two() {
                return Err(invalid("oracle.nx", "must be a power of two"));
            }
        }
    }
    Ok(())
}

pub fn grid_from(g: &GridConfig) -> vessel_core::Result<EvalGrid> {
    EvalGrid::new(g.x_min, g.x_max, g.nx, g.t_min, g.t_max, g.nt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_diagonal_config() {
        let text = br#"{
            "vessel": {"diagonal": {"mu": [[0.5, 0]], "b1": [[1, 0]], "b2": [[1, 0]]}},
            "grid": {"x_min": -8, "x_max": 8, "nx": 321, "t_min": 0, "t_max": 1, "nt": 101}
        }"#;
        let cfg = parse_config(text).unwrap();
        let d = cfg.vessel.diagonal.unwrap();
        assert_eq!(d.mu, vec![[0.5, 0.0]]);
        assert_eq!(cfg.output.dir, "out");
    }

    #[test]
    fn zero_mu_is_rejected_with_path() {
        let text = br#"{
            "vessel": {"diagonal": {"mu": [[0, 0]], "b1": [[1, 0]], "b2": [[1, 0]]}},
            "grid": {"x_min": -1, "x_max": 1, "nx": 11}
        }"#;
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("vessel.diagonal.mu[0]"), "{err}");
        assert!(err.contains("separated from zero"), "{err}");
    }

    #[test]
    fn conflicting_variants_name_both() {
        let text = br#"{
            "vessel": {
                "diagonal": {"mu": [[0.5, 0]], "b1": [[1, 0]], "b2": [[1, 0]]},
                "realized": {"A": [[[1, 0]]], "B0": [[[1, 0], [1, 0]]], "X0": [[[-1, 0]]]}
            },
            "grid": {"x_min": -1, "x_max": 1, "nx": 11}
        }"#;
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("diagonal and realized"), "{err}");
    }

    #[test]
    fn unknown_check_id_is_rejected() {
        let text = br#"{
            "vessel": {"diagonal": {"mu": [[0.5, 0]], "b1": [[1, 0]], "b2": [[1, 0]]}},
            "grid": {"x_min": -1, "x_max": 1, "nx": 11},
            "checks": ["ode", "bogus"]
        }"#;
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("checks[1]") && err.contains("bogus"), "{err}");
    }

    #[test]
    fn threshold_override_form() {
        let text = br#"{
            "vessel": {"diagonal": {"mu": [[0.5, 0]], "b1": [[1, 0]], "b2": [[1, 0]]}},
            "grid": {"x_min": -1, "x_max": 1, "nx": 11},
            "checks": [{"id": "tau", "threshold": 1e-6}]
        }"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.checks[0].id(), "tau");
        assert_eq!(cfg.checks[0].threshold(), Some(1e-6));
    }

    #[test]
    fn schema_errors_carry_paths() {
        let text = br#"{
            "vessel": {"diagonal": {"mu": "oops", "b1": [], "b2": []}},
            "grid": {"x_min": -1, "x_max": 1, "nx": 11}
        }"#;
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("vessel.diagonal.mu"), "{err}");
    }

    #[test]
    fn curve_config_roundtrip() {
        let text = br#"{
            "vessel": {"curve": {
                "family": "segment",
                "params": {"start": [0.05, -1.2], "end": [0.05, 1.2]},
                "b1_expr": "1", "b2_expr": "exp(-mu)*0.5",
                "quadrature_n": 16
            }},
            "grid": {"x_min": -1, "x_max": 1, "nx": 11}
        }"#;
        let cfg = parse_config(text).unwrap();
        assert!(matches!(
            cfg.vessel.curve.unwrap().family,
            CurveFamilyConfig::Segment { .. }
        ));
    }

    #[test]
    fn bad_expression_is_rejected_with_path() {
        let text = br#"{
            "vessel": {"curve": {
                "family": "segment",
                "params": {"start": [1, 0], "end": [2, 0]},
                "b1_expr": "frob(mu)", "b2_expr": "1",
                "quadrature_n": 4
            }},
            "grid": {"x_min": -1, "x_max": 1, "nx": 11}
        }"#;
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("b1_expr"), "{err}");
    }
}
