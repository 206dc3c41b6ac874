//! Residuals of the vessel ODEs, the spectral identities, the tau identities
//! and the moment recursions.

use vessel_core::params::sigma2;
use vessel_core::vessel::b_sigma2_bstar;
use vessel_core::{C64, CMatrix2, FiniteVessel, VesselError};

use crate::report::{Context, ResidualEntry, ResidualReport, Tolerances};
use crate::stencil::{d1, d2};

/// Default stencil step for the residual checks (x and t).
pub const DEFAULT_STEP: f64 = 1e-3;

const I1: C64 = C64::new(0.0, 1.0);

pub fn ode_residuals(v: &FiniteVessel, x: f64, t: f64, h: f64) -> ResidualReport {
    ode_residuals_with(v, x, t, h, &Tolerances::default())
}

/// Residuals of the five pointwise vessel conditions at `(x, t)`:
/// the B-equation in x, the X-equation in x, both t-evolution equations
/// (4th-order stencils with step `h`) and the algebraic Lyapunov equation.
pub fn ode_residuals_with(
    v: &FiniteVessel,
    x: f64,
    t: f64,
    h: f64,
    tol: &Tolerances,
) -> ResidualReport {
    let ids = ["ode-db", "ode-dx", "ode-dbt", "ode-dxt", "lyapunov"];
    let ctx = || Context::at(x, t);
    let evaluated = (|| -> Result<ResidualReport, VesselError> {
        let a = v.a_matrix();
        let an = a.norm();
        let b = v.eval_b(x, t)?;
        let xm = v.eval_x(x, t)?;
        let bn = b.norm();
        let xn = xm.norm();

        let b_of_x = |xx: f64| v.eval_b(xx, t);
        let b_of_t = |tt: f64| v.eval_b(x, tt);
        let x_of_x = |xx: f64| v.eval_x(xx, t);
        let x_of_t = |tt: f64| v.eval_x(x, tt);

        let db_dx = d1(b_of_x, x, h)?;
        let dx_dx = d1(x_of_x, x, h)?;
        let db_dt = d1(b_of_t, t, h)?;
        let dx_dt = d1(x_of_t, t, h)?;

        let mut b_s2 = b.clone();
        b_s2.column_mut(0).scale_mut(0.5);
        b_s2.column_mut(1).scale_mut(-0.5);

        let r_db = (&db_dx + &a * &b_s2).norm();
        let flux = b_sigma2_bstar(&b);
        let r_dx = (&dx_dx - &flux).norm();
        let r_dbt = (&db_dt - (&a * &db_dx) * I1).norm();
        let r_dxt = (&dx_dt - ((&a * &flux) * I1 - (&flux * a.adjoint()) * I1)).norm();
        let r_lyap = (&a * &xm + &xm * a.adjoint() + &b * b.adjoint()).norm();

        // Derivative-scale bounds: x-derivatives of B gain |A|/2 per order,
        // t-derivatives |A|^2/2; X-derivatives are one order of B lower but
        // quadratic in B.
        let s_db = (1.0 + an).powi(5) * (1.0 + bn) / 30.0;
        let s_dx = (1.0 + an).powi(5) * (1.0 + bn).powi(2) / 30.0;
        let s_dbt = ((1.0 + an * an).powi(5) + (1.0 + an).powi(6)) * (1.0 + bn) / 30.0;
        let s_dxt = (1.0 + an * an).powi(5) * (1.0 + an) * (1.0 + bn).powi(2) / 30.0;

        let entries = vec![
            ResidualEntry::new("ode-db", r_db, tol.stencil_d1("ode-db", h, s_db, 1.0 + bn), ctx()),
            ResidualEntry::new("ode-dx", r_dx, tol.stencil_d1("ode-dx", h, s_dx, 1.0 + xn), ctx()),
            ResidualEntry::new(
                "ode-dbt",
                r_dbt,
                tol.stencil_d1("ode-dbt", h, s_dbt, (1.0 + bn) * (1.0 + an)),
                ctx(),
            ),
            ResidualEntry::new(
                "ode-dxt",
                r_dxt,
                tol.stencil_d1("ode-dxt", h, s_dxt, (1.0 + xn) * (1.0 + an)),
                ctx(),
            ),
            ResidualEntry::new("lyapunov", r_lyap, tol.algebraic("lyapunov", xn), ctx()),
        ];
        Ok(ResidualReport::new(entries))
    })();
    match evaluated {
        Ok(report) => report,
        Err(e) => ResidualReport::new(
            ids.iter().map(|id| ResidualEntry::unevaluable(*id, ctx(), e.to_string())).collect(),
        ),
    }
}

pub fn spectral_identities(
    v: &FiniteVessel,
    lambda: C64,
    xs: &[f64],
    t: f64,
) -> Result<ResidualReport, VesselError> {
    spectral_identities_with(v, lambda, xs, t, &Tolerances::default())
}

/// Permanency of the transfer function over `xs` at fixed `t`:
/// `max_x |S*(-conj(lambda), x) S(lambda, x) - I|` and
/// `max_x |det S(lambda, x) - det S(lambda, x0)|`.
pub fn spectral_identities_with(
    v: &FiniteVessel,
    lambda: C64,
    xs: &[f64],
    t: f64,
    tol: &Tolerances,
) -> Result<ResidualReport, VesselError> {
    let det = |m: &CMatrix2| m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let base = v.state(v.base_point(), t)?;
    let det0 = det(&base.transfer(lambda)?);

    let mut sym_max = 0.0f64;
    let mut drift_max = 0.0f64;
    for &x in xs {
        let s = v.state(x, t)?;
        let s_l = s.transfer(lambda)?;
        let s_refl = s.transfer(-lambda.conj())?;
        sym_max = sym_max.max((s_refl.adjoint() * s_l - CMatrix2::identity()).norm());
        drift_max = drift_max.max((det(&s_l) - det0).norm());
    }
    let ctx = || Context { t: Some(t), ..Context::default() }.with_lambda(lambda);
    Ok(ResidualReport::new(vec![
        ResidualEntry::new("symmetry", sym_max, tol.resolve("symmetry", 1e-9), ctx()),
        ResidualEntry::new("det-constancy", drift_max, tol.resolve("det-constancy", 1e-9), ctx()),
    ]))
}

pub fn tau_identity_residual(v: &FiniteVessel, x: f64, t: f64, h: f64) -> ResidualReport {
    tau_identity_residual_with(v, x, t, h, &Tolerances::default())
}

/// The two tau identities at `(x, t)`:
/// `d/dx log tau = (H0_11 - H0_22) / 2` and `d^2/dx^2 log tau = |beta|^2`,
/// with `log tau` differentiated by the 5-point stencil.
pub fn tau_identity_residual_with(
    v: &FiniteVessel,
    x: f64,
    t: f64,
    h: f64,
    tol: &Tolerances,
) -> ResidualReport {
    let ids = ["tau-logderiv", "tau-curvature"];
    let ctx = || Context::at(x, t);
    let evaluated = (|| -> Result<ResidualReport, String> {
        // Guard: tau must stay well away from zero across the stencil.
        let mut taus = Vec::with_capacity(5);
        for k in -2i32..=2 {
            let tau = v.tau(x + k as f64 * h, t).map_err(|e| e.to_string())?;
            taus.push(tau);
        }
        let tau_max = taus.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if taus.iter().any(|z| z.norm() < 1e-12 * tau_max) || tau_max == 0.0 {
            return Err("tau vanishes under the stencil".into());
        }
        let log_tau = |xx: f64| v.tau(xx, t).map(|z| z.ln());
        let d1_log = d1(log_tau, x, h).map_err(|e| e.to_string())?;
        let d2_log = d2(log_tau, x, h).map_err(|e| e.to_string())?;

        let state = v.state(x, t).map_err(|e| e.to_string())?;
        let h0 = state.moment(0);
        let beta = h0[(0, 1)];
        let r1 = (d1_log - 0.5 * (h0[(0, 0)] - h0[(1, 1)])).norm();
        let r2 = (d2_log - C64::new(beta.norm_sqr(), 0.0)).norm();

        let an = v.a_norm();
        let h0n = h0.norm();
        let log_mag = taus.iter().map(|z| z.ln().norm()).fold(0.0f64, f64::max);
        let s1 = (1.0 + an).powi(5) * (1.0 + h0n) / 30.0;
        let s2 = (1.0 + an).powi(6) * (1.0 + h0n.powi(2)) / 90.0;
        Ok(ResidualReport::new(vec![
            ResidualEntry::new("tau-logderiv", r1, tol.stencil_d1("tau-logderiv", h, s1, 1.0 + log_mag), ctx()),
            ResidualEntry::new("tau-curvature", r2, tol.stencil_d2("tau-curvature", h, s2, 1.0 + log_mag), ctx()),
        ]))
    })();
    match evaluated {
        Ok(report) => report,
        Err(reason) => ResidualReport::new(
            ids.iter().map(|id| ResidualEntry::unevaluable(*id, ctx(), reason.clone())).collect(),
        ),
    }
}

pub fn moment_recursion_residual(v: &FiniteVessel, x: f64, t: f64, n_max: usize) -> ResidualReport {
    moment_recursion_residual_with(v, x, t, n_max, DEFAULT_STEP, &Tolerances::default())
}

/// Moment identities for `n = 0 .. n_max-1` at `(x, t)`:
///
/// * recursion: `sigma2 H_{n+1} - H_{n+1} sigma2 = (H_n)_x - gamma_* H_n`,
///   together with its explicit 12/21 entry forms,
/// * evolution: `(H_n)_t = i (H_{n+1})_x + i (H_0)_x H_n`,
/// * the structure of `(H_0)_x` (diagonal `|beta|^2, -|beta|^2`, Hermitian
///   off-diagonal pair).
pub fn moment_recursion_residual_with(
    v: &FiniteVessel,
    x: f64,
    t: f64,
    n_max: usize,
    h: f64,
    tol: &Tolerances,
) -> ResidualReport {
    assert!(n_max >= 1, "n_max must be at least 1");
    let ctx_n = |n: usize| Context::at(x, t).with_n(n as u32);
    let evaluated = (|| -> Result<ResidualReport, VesselError> {
        let moments_at_x = |xx: f64| -> Result<Vec<CMatrix2>, VesselError> {
            Ok(v.state(xx, t)?.moments(n_max + 1))
        };
        let moments_at_t = |tt: f64| -> Result<Vec<CMatrix2>, VesselError> {
            Ok(v.state(x, tt)?.moments(n_max + 1))
        };
        let center = v.state(x, t)?;
        let h_center = center.moments(n_max + 1);
        let gamma = center.gamma_star();
        let beta = center.beta();
        let s2 = sigma2();

        // Stencil derivatives of every moment order at once.
        let dx_all = d1(|xx| moments_at_x(xx).map(MomentVec), x, h)?.0;
        let dt_all = d1(|tt| moments_at_t(tt).map(MomentVec), t, h)?.0;

        let an = v.a_norm();
        let hmax = h_center.iter().map(|m| m.norm()).fold(0.0f64, f64::max);
        let mut entries = Vec::new();

        for n in 0..n_max {
            let rec = s2 * h_center[n + 1] - h_center[n + 1] * s2 - dx_all[n] + gamma * h_center[n];
            let evo = dt_all[n] - dx_all[n + 1] * I1 - (dx_all[0] * h_center[n]) * I1;
            let e12 = h_center[n + 1][(0, 1)] - (dx_all[n][(0, 1)] - beta * h_center[n][(1, 1)]);
            let e21 = h_center[n + 1][(1, 0)] - (-dx_all[n][(1, 0)] - beta.conj() * h_center[n][(0, 0)]);

            let scale = (1.0 + an).powi(n as i32 + 6) * (1.0 + hmax) / 30.0;
            let mag = (1.0 + hmax) * (1.0 + an);
            entries.push(ResidualEntry::new(
                "moment-recursion",
                rec.norm(),
                tol.stencil_d1("moment-recursion", h, scale, mag),
                ctx_n(n),
            ));
            entries.push(ResidualEntry::new(
                "moment-evolution",
                evo.norm(),
                tol.stencil_d1("moment-evolution", h, scale * (1.0 + an * an), mag),
                ctx_n(n),
            ));
            entries.push(ResidualEntry::new(
                "moment-entry-12",
                e12.norm(),
                tol.stencil_d1("moment-entry-12", h, scale, mag),
                ctx_n(n),
            ));
            entries.push(ResidualEntry::new(
                "moment-entry-21",
                e21.norm(),
                tol.stencil_d1("moment-entry-21", h, scale, mag),
                ctx_n(n),
            ));
        }

        // (H_0)_x = [[|beta|^2, beta_x], [conj(beta_x), -|beta|^2]]
        let b2 = C64::new(beta.norm_sqr(), 0.0);
        let g12 = dx_all[0][(0, 1)];
        let expected = CMatrix2::new(b2, g12, g12.conj(), -b2);
        let structure = (dx_all[0] - expected).norm();
        let scale0 = (1.0 + an).powi(6) * (1.0 + hmax).powi(2) / 30.0;
        entries.push(ResidualEntry::new(
            "h0x-structure",
            structure,
            tol.stencil_d1("h0x-structure", h, scale0, (1.0 + hmax).powi(2)),
            Context::at(x, t),
        ));
        Ok(ResidualReport::new(entries))
    })();
    match evaluated {
        Ok(report) => report,
        Err(e) => {
            let ids = ["moment-recursion", "moment-evolution", "moment-entry-12", "moment-entry-21", "h0x-structure"];
            ResidualReport::new(
                ids.iter()
                    .map(|id| ResidualEntry::unevaluable(*id, Context::at(x, t), e.to_string()))
                    .collect(),
            )
        }
    }
}

/// Vector of 2x2 moments with the arithmetic the stencils need.
#[derive(Clone)]
struct MomentVec(Vec<CMatrix2>);

impl std::ops::Sub for MomentVec {
    type Output = MomentVec;
    fn sub(self, rhs: MomentVec) -> MomentVec {
        MomentVec(self.0.into_iter().zip(rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl std::ops::Add for MomentVec {
    type Output = MomentVec;
    fn add(self, rhs: MomentVec) -> MomentVec {
        MomentVec(self.0.into_iter().zip(rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Mul<C64> for MomentVec {
    type Output = MomentVec;
    fn mul(self, rhs: C64) -> MomentVec {
        MomentVec(self.0.into_iter().map(|m| m * rhs).collect())
    }
}

