//! Command-line front end: run named experiments, print one verdict line
//! per check, and write `report.json` plus per-check CSVs.
//!
//! Exit codes: `0` all checks PASS, `1` any FAIL, `2` usage or
//! configuration error, `3` any INDETERMINATE with no FAIL.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use distpair::config::{Experiment, RunConfig};
use distpair::outcome::{aggregate_verdict, exit_code};
use distpair::report::emit_report;

/// Distribution-pairing laboratory: machine checks of singular-kernel
/// identities under principal-value, finite-part and eps-shift readings.
#[derive(Debug, Parser)]
#[command(name = "distpair", version)]
struct Cli {
    /// Experiment to run: verify-derivative, moments, identity-11-12,
    /// semiclassical, series-accuracy, eps-decomposition, or all.
    experiment: Option<String>,

    /// Flat `key = value` config file; flags given here override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Global tolerance override applied to every check.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,

    /// Output directory for report.json and per-check CSV files.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Comma-separated decreasing ladder for the eps -> 0 extrapolations.
    #[arg(long, value_name = "a,b,c", value_delimiter = ',')]
    eps_ladder: Option<Vec<f64>>,

    /// Thermal-time scale `lambda = pi kT / hbar` of the noise checks.
    #[arg(long, value_name = "X")]
    lambda: Option<f64>,

    /// Highest moment order `m` in comb and identity grids (at most 3).
    #[arg(long, value_name = "N")]
    max_m: Option<u32>,

    /// Finite shift used by the moment table and the comb expansion.
    #[arg(long, value_name = "X")]
    eps: Option<f64>,

    /// Seed for the probe-coefficient draws in the linearity check.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprintln!(
        "usage: distpair <experiment> [--config PATH] [--tol X] [--out DIR] \
         [--eps-ladder a,b,c] [--lambda X] [--max-m N] [--eps X] [--seed N]"
    );
    eprintln!(
        "experiments: verify-derivative | moments | identity-11-12 | semiclassical \
         | series-accuracy | eps-decomposition | all"
    );
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(threads) = std::env::var("DISTPAIR_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                // Failure means a pool already exists (e.g. under a test
                // harness); the existing pool then governs.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => return usage_error("DISTPAIR_THREADS must be a positive integer"),
        }
    }

    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        if let Err(e) = cfg.apply_file(path) {
            return usage_error(&e.to_string());
        }
    }
    if let Some(t) = cli.tol {
        cfg.tol = Some(t);
    }
    if let Some(dir) = cli.out {
        cfg.out_dir = dir;
    }
    if let Some(ladder) = cli.eps_ladder {
        cfg.eps_ladder = ladder;
    }
    if let Some(lambda) = cli.lambda {
        cfg.lambda = lambda;
    }
    if let Some(m) = cli.max_m {
        cfg.max_m = m;
    }
    if let Some(e) = cli.eps {
        cfg.eps = e;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(name) = &cli.experiment {
        match Experiment::parse(name) {
            Some(exps) => cfg.experiments = exps,
            None => return usage_error(&format!("unknown experiment '{name}'")),
        }
    }
    if cfg.experiments.is_empty() {
        return usage_error("no experiment requested");
    }
    if let Err(e) = cfg.validate() {
        return usage_error(&e.to_string());
    }

    let outcomes = match distpair::run(&cfg) {
        Ok(o) => o,
        Err(e) => return usage_error(&e.to_string()),
    };

    for o in &outcomes {
        println!(
            "check {:<26} {:<13} residual {:>10.3e}  (tol {:>8.1e})",
            o.name,
            o.verdict.as_str(),
            o.residual,
            o.tolerance
        );
    }

    if let Err(e) = emit_report(&outcomes, &cfg.out_dir) {
        return usage_error(&format!(
            "cannot write report to '{}': {e}",
            cfg.out_dir.display()
        ));
    }

    let verdict = aggregate_verdict(&outcomes);
    println!("verdict: {verdict}");
    println!("report: {}", cfg.out_dir.join("report.json").display());
    ExitCode::from(exit_code(verdict) as u8)
}
