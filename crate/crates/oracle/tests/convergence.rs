//! Accuracy contracts for the split-step oracle: soliton exactness,
//! second-order convergence, mass conservation over long runs, and
//! cross-validation against vessel fields.

use vessel_core::{build_diagonal, C64, EvalGrid, FiniteVessel};
use splitstep_oracle::{cross_validate, splitstep_solve, CrossValidateOptions, OracleError};

fn re(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn sech_profile(nx: usize, lo: f64, hi: f64) -> (Vec<C64>, Vec<f64>) {
    let dx = (hi - lo) / nx as f64;
    let xs: Vec<f64> = (0..nx).map(|j| lo + j as f64 * dx).collect();
    let y0 = xs.iter().map(|x| re(-1.0 / x.cosh())).collect();
    (y0, xs)
}

fn one_soliton() -> FiniteVessel {
    build_diagonal(&[re(0.5)], &[re(1.0)], &[re(1.0)], 0.0).unwrap()
}

fn two_soliton() -> FiniteVessel {
    build_diagonal(&[re(0.5), re(0.9)], &[re(1.0), re(0.8)], &[re(1.2), re(-0.9)], 0.0).unwrap()
}

#[test]
fn soliton_to_unit_time_matches_closed_form() {
    // y(x, t) = -sech(x) e^{it} exactly; dt = 1e-3 leaves only the O(dt^2)
    // splitting error.
    let lo = -20.0 * std::f64::consts::PI;
    let hi = 20.0 * std::f64::consts::PI;
    let (y0, xs) = sech_profile(2048, lo, hi);
    let f = splitstep_solve(&y0, lo, hi, 1e-3, 1000, 1000).unwrap();
    let (t_end, last) = f.snapshots.last().unwrap();
    assert!((t_end - 1.0).abs() < 1e-12);
    let phase = C64::from_polar(1.0, 1.0);
    let worst = xs
        .iter()
        .zip(last)
        .map(|(x, y)| (y - re(-1.0 / x.cosh()) * phase).norm())
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-6, "soliton error {worst:.3e}");
}

#[test]
fn splitting_error_is_second_order() {
    let lo = -20.0 * std::f64::consts::PI;
    let hi = 20.0 * std::f64::consts::PI;
    let (y0, xs) = sech_profile(1024, lo, hi);
    let err_at = |dt: f64| {
        let steps = (1.0 / dt).round() as usize;
        let f = splitstep_solve(&y0, lo, hi, dt, steps, steps).unwrap();
        let (_, last) = f.snapshots.last().unwrap();
        let phase = C64::from_polar(1.0, 1.0);
        xs.iter()
            .zip(last)
            .map(|(x, y)| (y - re(-1.0 / x.cosh()) * phase).norm())
            .fold(0.0f64, f64::max)
    };
    let ratio = err_at(4e-3) / err_at(2e-3);
    assert!((3.5..4.5).contains(&ratio), "dt-halving ratio {ratio}");
}

#[test]
fn mass_is_conserved_over_ten_thousand_steps() {
    let lo = -40.0;
    let hi = 40.0;
    let (y0, _) = sech_profile(512, lo, hi);
    let f = splitstep_solve(&y0, lo, hi, 1e-4, 10_000, 2000).unwrap();
    let drift = f.mass_drift();
    assert!(drift < 1e-10, "relative mass drift {drift:.3e}");
}

#[test]
fn cross_validation_of_single_time_slice_is_exact() {
    let v = one_soliton();
    let g = EvalGrid::stationary(-10.0, 10.0, 101, 0.0).unwrap();
    let cv = cross_validate(&v, &g, &CrossValidateOptions::new(1e-3)).unwrap();
    // Seeding and comparison use the same samples: zero difference.
    assert_eq!(cv.max_difference, 0.0);
    assert!(cv.report.pass());
}

#[test]
fn cross_validation_of_one_soliton_field() {
    let v = one_soliton();
    let g = EvalGrid::new(-10.0, 10.0, 81, 0.0, 1.0, 11).unwrap();
    let mut opts = CrossValidateOptions::new(1e-3);
    opts.nx = Some(2048);
    let cv = cross_validate(&v, &g, &opts).unwrap();
    assert!(cv.max_difference < 1e-4, "max difference {:.3e}", cv.max_difference);
    assert!(cv.report.pass(), "{}", cv.report.to_json());
}

#[test]
fn cross_validation_converges_quadratically_on_two_soliton() {
    let v = two_soliton();
    // A narrower window than the 1-soliton run: the 4x padding tail of the
    // fast/slow soliton pair stays inside the rank test's conditioning range.
    let g = EvalGrid::new(-6.0, 6.0, 41, 0.0, 1.0, 3).unwrap();
    let diff_at = |dt: f64| {
        let mut opts = CrossValidateOptions::new(dt);
        opts.nx = Some(2048);
        cross_validate(&v, &g, &opts).unwrap().max_difference
    };
    let ratio = diff_at(4e-3) / diff_at(2e-3);
    assert!((3.5..4.5).contains(&ratio), "dt-halving ratio {ratio}");
}

#[test]
fn cross_validation_refuses_non_decaying_windows() {
    // A window ending mid-soliton leaves boundary magnitude far above the
    // 1e-8 relative limit even after 4x padding.
    let v = one_soliton();
    let g = EvalGrid::new(0.0, 1.0, 11, 0.0, 0.5, 2).unwrap();
    match cross_validate(&v, &g, &CrossValidateOptions::new(1e-3)) {
        Err(OracleError::BoundaryEnergy { magnitude, .. }) => {
            assert!(magnitude > 0.0);
        }
        other => panic!("expected BoundaryEnergy, got {other:?}"),
    }
}
