//! CSV and JSON artifact writers.
//!
//! Numbers are written with Rust's shortest round-trip `Display` for f64, and
//! no file contains timestamps, so identical configs produce byte-identical
//! data files. Volatile information (wall clock) lives only in the manifest.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use splitstep_oracle::ComparisonRow;
use vessel_core::{BetaField, C64, FiniteVessel};
use vessel_verify::ResidualReport;

pub fn write_beta_csv(path: &Path, field: &BetaField) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,t,re_beta,im_beta,abs_beta,valid")?;
    let g = field.grid();
    for it in 0..g.nt {
        let t = g.t_at(it);
        for ix in 0..g.nx {
            let x = g.x_at(ix);
            let v = field.value(ix, it);
            writeln!(
                w,
                "{},{},{},{},{},{}",
                x,
                t,
                v.re,
                v.im,
                v.norm(),
                u8::from(field.is_valid(ix, it))
            )?;
        }
    }
    w.flush()
}

/// tau along the first time slice, columns `x,re_tau,im_tau`. Nodes where
/// tau is unevaluable (outside the window of invertibility) are skipped.
pub fn write_tau_csv(path: &Path, vessel: &FiniteVessel, xs: &[f64], t: f64) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,re_tau,im_tau")?;
    for &x in xs {
        if let Ok(tau) = vessel.tau(x, t) {
            writeln!(w, "{},{},{}", x, tau.re, tau.im)?;
        }
    }
    w.flush()
}

pub fn write_residuals_json(path: &Path, report: &ResidualReport) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(report.to_json().as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()
}

pub fn write_oracle_csv(path: &Path, rows: &[ComparisonRow]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,x,re_beta,im_beta,re_oracle,im_oracle,abs_diff")?;
    for r in rows {
        let diff: C64 = r.vessel - r.oracle;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.t, r.x, r.vessel.re, r.vessel.im, r.oracle.re, r.oracle.im,
            diff.norm()
        )?;
    }
    w.flush()
}
