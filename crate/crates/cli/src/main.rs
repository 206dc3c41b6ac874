//! `vessel-nls`: build NLS vessels from a JSON config, sample beta fields,
//! run the identity suite, and cross-validate against the split-step solver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vessel_cli::config::{self, parse_config, CheckSelect, RunConfig};
use vessel_cli::runner::{self, run, run_demo, Stages};

#[derive(Parser)]
#[command(name = "vessel-nls", version, about = "NLS vessel construction and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid override `x0:x1:nx,t0:t1:nt`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the vessel and run the identity suite (no field export).
    BuildCheck {
        #[command(flatten)]
        common: CommonArgs,
        /// Check ids to run (overrides the config's list).
        #[arg(long = "check")]
        checks: Vec<String>,
    },
    /// Export the beta field and tau slice as CSV.
    Field {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Full residual suite: field export plus every selected check.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long = "check")]
        checks: Vec<String>,
    },
    /// Cross-validate the beta field against the split-step solver.
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Time step override for the solver.
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Write the shipped 1-soliton and 2-soliton configs and run both.
    Demo {
        /// Output directory.
        #[arg(long, default_value = "demo-out")]
        out: PathBuf,
    },
}

fn parse_grid_override(spec: &str) -> Result<config::GridConfig, String> {
    // x0:x1:nx,t0:t1:nt
    let (xpart, tpart) = spec
        .split_once(',')
        .ok_or_else(|| format!("grid override '{spec}' must be 'x0:x1:nx,t0:t1:nt'"))?;
    let parse3 = |part: &str| -> Result<(f64, f64, usize), String> {
        let fields: Vec<&str> = part.split(':').collect();
        if fields.len() != 3 {
            return Err(format!("expected three ':'-separated fields in '{part}'"));
        }
        Ok((
            fields[0].parse().map_err(|e| format!("'{}': {e}", fields[0]))?,
            fields[1].parse().map_err(|e| format!("'{}': {e}", fields[1]))?,
            fields[2].parse().map_err(|e| format!("'{}': {e}", fields[2]))?,
        ))
    };
    let (x_min, x_max, nx) = parse3(xpart)?;
    let (t_min, t_max, nt) = parse3(tpart)?;
    Ok(config::GridConfig { x_min, x_max, nx, t_min, t_max, nt })
}

fn load_config(common: &CommonArgs, checks_override: &[String]) -> Result<(RunConfig, PathBuf), String> {
    let bytes = std::fs::read(&common.config)
        .map_err(|e| format!("cannot read {}: {e}", common.config.display()))?;
    let mut cfg = parse_config(&bytes).map_err(|e| e.to_string())?;
    if let Some(spec) = &common.grid {
        cfg.grid = parse_grid_override(spec)?;
        config::grid_from(&cfg.grid).map_err(|e| format!("grid override: {e}"))?;
    }
    if !checks_override.is_empty() {
        let known = config::all_group_ids();
        for id in checks_override {
            if !known.contains(&id.as_str()) {
                return Err(format!("unknown check id '{id}'; known: {}", known.join(", ")));
            }
        }
        cfg.checks = checks_override.iter().cloned().map(CheckSelect::Id).collect();
    }
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    Ok((cfg, out))
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Ok(raw) = std::env::var("VESSEL_NLS_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                // A later second call (e.g. in tests) fails harmlessly.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring invalid VESSEL_NLS_THREADS={raw}"),
        }
    }
}

fn report(manifest: &runner::RunManifest, out: &std::path::Path) {
    for check in &manifest.checks {
        println!(
            "{:12} {}  entries: {}, max residual: {:.3e}{}",
            check.id,
            if check.pass { "pass" } else { "FAIL" },
            check.entries,
            check.max_residual,
            if check.unevaluable > 0 {
                format!(", unevaluable: {}", check.unevaluable)
            } else {
                String::new()
            }
        );
    }
    println!(
        "{}: artifacts in {} ({:.2} s)",
        if manifest.summary_pass { "pass" } else { "FAIL" },
        out.display(),
        manifest.wall_clock_seconds.total
    );
}

fn execute(cfg: &RunConfig, out: &std::path::Path, stages: Stages) -> Result<bool, String> {
    let manifest = run(cfg, out, stages).map_err(|e| e.to_string())?;
    report(&manifest, out);
    Ok(manifest.summary_pass)
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let outcome: Result<bool, String> = match &cli.command {
        Command::BuildCheck { common, checks } => load_config(common, checks)
            .and_then(|(cfg, out)| execute(&cfg, &out, Stages { field: false, checks: true, oracle: false })),
        Command::Field { common } => load_config(common, &[])
            .and_then(|(cfg, out)| execute(&cfg, &out, Stages { field: true, checks: false, oracle: false })),
        Command::Verify { common, checks } => load_config(common, checks)
            .and_then(|(cfg, out)| execute(&cfg, &out, Stages { field: true, checks: true, oracle: false })),
        Command::Oracle { common, dt } => load_config(common, &[]).and_then(|(mut cfg, out)| {
            match (&mut cfg.oracle, dt) {
                (Some(oc), Some(dt)) => oc.dt = *dt,
                (None, Some(dt)) => cfg.oracle = Some(config::OracleConfig { dt: *dt, padding: 4.0, nx: None }),
                (None, None) => return Err("oracle run needs `oracle` in the config or --dt".into()),
                _ => {}
            }
            execute(&cfg, &out, Stages { field: false, checks: false, oracle: true })
        }),
        Command::Demo { out } => run_demo(out).map_err(|e| e.to_string()).map(|results| {
            let mut all_pass = true;
            for (dir, manifest) in &results {
                println!("== {}", dir.display());
                report(manifest, dir);
                all_pass &= manifest.summary_pass;
            }
            all_pass
        }),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
