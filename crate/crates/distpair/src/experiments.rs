//! The named experiments behind the CLI: each one runs a bundle of checks
//! and returns their `CheckOutcome`s for reporting.
//!
//! - `verify-derivative` — the central verdict: the weak derivative of
//!   `coth` is `-(csch^2)_st` with no extra `2 delta(y)` term, plus
//!   linearity of the regularized pairings in the probe.
//! - `moments` — numeric moments of `Im coth(. + i eps)` against their
//!   Bernoulli closed forms, the `mu_0 = -2` mass of the standardized
//!   `csch^2`, the `eps -> 0` moment limits, the moment asymptotic
//!   expansion, and the delta-comb reading for wide probes.
//! - `identity-11-12` — the cosh-power integral against its sine-series
//!   closed form, and the accelerated sine series against Bernoulli
//!   polynomials.
//! - `semiclassical` — the autocorrelation split `A = F + 2 kT zeta phi(0)`
//!   with three-route agreement, the white-noise limit along a `lambda`
//!   ladder, the order `-3` moment-route residual slope, and the
//!   double-quadrature cross-check.
//! - `series-accuracy` — truncated partial-fraction series with tail
//!   correction against direct evaluation, and the sign decomposition of
//!   `coth`.
//! - `eps-decomposition` — the shifted-kernel split into principal value,
//!   bounded series, and `-i pi delta`, plus the nascent-delta limit
//!   `<Im coth(. + i eps), phi> -> -pi phi(0)`.
//!
//! Experiments run in parallel; outcomes are collected in declaration
//! order so reports are deterministic.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ConfigError, Experiment, RunConfig};
use crate::moments::{self, MomentError, MomentTable};
use crate::noise::{self, CutoffSpec, NoiseError, PhysicalParams};
use crate::outcome::{fnv1a_hex, CheckOutcome, DetailRow};
use crate::pairing::{
    self, pair, pair_with_ladder, KernelKind, KernelSpec, PairingError, DEFAULT_TOL,
};
use crate::probes::{shifted_family, FamilySeed, Probe, ProbeError, ScaledProbe, TestFunction};
use crate::probes::LinCombProbe;
use crate::report::fmt_f64;
use crate::special::{SeriesTruncation, SpecialError};

/// Any error an experiment can surface.  These are configuration or
/// programming errors — numerical trouble is reported through outcome
/// verdicts, not through this type.
#[derive(Debug)]
pub enum ExperimentError {
    Pairing(PairingError),
    Moment(MomentError),
    Noise(NoiseError),
    Probe(ProbeError),
    Special(SpecialError),
    Config(ConfigError),
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentError::Pairing(e) => write!(f, "pairing: {e}"),
            ExperimentError::Moment(e) => write!(f, "moments: {e}"),
            ExperimentError::Noise(e) => write!(f, "noise: {e}"),
            ExperimentError::Probe(e) => write!(f, "probe: {e}"),
            ExperimentError::Special(e) => write!(f, "special function: {e}"),
            ExperimentError::Config(e) => write!(f, "config: {e}"),
        }
    }
}

impl std::error::Error for ExperimentError {}

impl From<PairingError> for ExperimentError {
    fn from(e: PairingError) -> Self {
        ExperimentError::Pairing(e)
    }
}
impl From<MomentError> for ExperimentError {
    fn from(e: MomentError) -> Self {
        ExperimentError::Moment(e)
    }
}
impl From<NoiseError> for ExperimentError {
    fn from(e: NoiseError) -> Self {
        ExperimentError::Noise(e)
    }
}
impl From<ProbeError> for ExperimentError {
    fn from(e: ProbeError) -> Self {
        ExperimentError::Probe(e)
    }
}
impl From<SpecialError> for ExperimentError {
    fn from(e: SpecialError) -> Self {
        ExperimentError::Special(e)
    }
}
impl From<ConfigError> for ExperimentError {
    fn from(e: ConfigError) -> Self {
        ExperimentError::Config(e)
    }
}

/// Run every experiment in `cfg.experiments` and collect the outcomes in
/// declaration order.
pub fn run(cfg: &RunConfig) -> Result<Vec<CheckOutcome>, ExperimentError> {
    let groups: Result<Vec<Vec<CheckOutcome>>, ExperimentError> =
        cfg.experiments.par_iter().map(|e| run_experiment(*e, cfg)).collect();
    Ok(groups?.into_iter().flatten().collect())
}

/// Run one named experiment.
pub fn run_experiment(
    exp: Experiment,
    cfg: &RunConfig,
) -> Result<Vec<CheckOutcome>, ExperimentError> {
    match exp {
        Experiment::VerifyDerivative => verify_derivative(cfg),
        Experiment::Moments => moments_experiment(cfg),
        Experiment::Identity1112 => identity_11_12(cfg),
        Experiment::Semiclassical => semiclassical(cfg),
        Experiment::SeriesAccuracy => series_accuracy(cfg),
        Experiment::EpsDecomposition => eps_decomposition(cfg),
    }
}

fn verify_derivative(cfg: &RunConfig) -> Result<Vec<CheckOutcome>, ExperimentError> {
    let battery = shifted_family(&FamilySeed::default())?;
    let identity = pairing::check_derivative_identity(&battery, cfg.tol_or(1e-6))?;
    let linearity = pairing_linearity(&battery, cfg.seed, cfg.tol_or(1e-7))?;
    Ok(vec![identity, linearity])
}

/// Linearity of the regularized pairings in the probe argument.  The
/// combination coefficients are drawn from a seeded generator so reruns
/// are reproducible without being hand-picked.
fn pairing_linearity(
    battery: &[TestFunction],
    seed: u64,
    tol: f64,
) -> Result<CheckOutcome, ExperimentError> {
    let kernels = [KernelSpec::coth(), KernelSpec::inv_y(), KernelSpec::csch2()];
    let index_pairs = [(0usize, 2usize), (1usize, 7usize)];
    let pair_tol = (tol * 1e-2).clamp(1e-12, 1e-9);

    // Draw all coefficients up front so parallel evaluation cannot change
    // which job sees which draw.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::new();
    for t in &kernels {
        for &(i, j) in &index_pairs {
            let a: f64 = rng.gen_range(-2.0..2.0);
            let b: f64 = rng.gen_range(-2.0..2.0);
            jobs.push((t.clone(), i, j, a, b));
        }
    }

    let rows: Result<Vec<_>, ExperimentError> = jobs
        .par_iter()
        .map(|(t, i, j, a, b)| {
            let p = &battery[*i];
            let q = &battery[*j];
            let comb = LinCombProbe { a: *a, p, b: *b, q };
            let lhs = pair(t, &comb, pair_tol)?;
            let rp = pair(t, p, pair_tol)?;
            let rq = pair(t, q, pair_tol)?;
            let rhs = a * rp.value + b * rq.value;
            let diff = lhs.value - rhs;
            let conv = lhs.converged && rp.converged && rq.converged;
            Ok((
                DetailRow::new(
                    format!("{}[{} | {}]", t.kind.as_str(), p.label(), q.label()),
                    vec![
                        ("a", *a),
                        ("b", *b),
                        ("combined", lhs.value),
                        ("linear", rhs),
                        ("diff", diff),
                    ],
                ),
                diff.abs(),
                conv,
            ))
        })
        .collect();
    let rows = rows?;
    let residual = rows.iter().map(|(_, d, _)| *d).fold(0.0, f64::max);
    let all_converged = rows.iter().all(|(_, _, c)| *c);
    let digest = fnv1a_hex(&format!(
        "check=pairing_linearity;seed={seed};kernels=[coth,1/y,csch2];tol={}",
        fmt_f64(tol)
    ));
    Ok(CheckOutcome::from_residual(
        "pairing_linearity",
        residual,
        tol,
        all_converged,
        digest,
        rows.into_iter().map(|(r, _, _)| r).collect(),
    ))
}

fn moments_experiment(cfg: &RunConfig) -> Result<Vec<CheckOutcome>, ExperimentError> {
    let pair_tol = cfg.tol_or(DEFAULT_TOL);

    let mut eps_list = vec![0.3];
    if (cfg.eps - 0.3).abs() > 1e-12 {
        eps_list.push(cfg.eps);
    }
    let table = MomentTable::build(&eps_list, 2 * cfg.max_m + 1, pair_tol)?;
    let table_outcome = table.outcome("moment_table", cfg.tol_or(1e-7));

    let mass = csch2_mass_check(cfg.tol_or(1e-8))?;
    let limits = moment_limits_check(cfg.max_m, cfg.tol_or(1e-5))?;
    let asymptotic = asymptotic_expansion_check(cfg, cfg.tol_or(0.5))?;
    let comb = delta_series_check(cfg, cfg.tol_or(1e-4))?;
    Ok(vec![table_outcome, mass, limits, asymptotic, comb])
}

/// `mu_0` of the standardized `csch^2`: the mass that carries the entire
/// classical delta, exactly `-2`.
fn csch2_mass_check(tol: f64) -> Result<CheckOutcome, ExperimentError> {
    let mass = moments::moment(&KernelSpec::csch2(), 0, (tol * 1e-1).clamp(1e-12, 1e-9))?;
    let diff = mass.value + 2.0;
    let rows = vec![DetailRow::new(
        "mu_0[(csch^2)_st]",
        vec![
            ("numeric", mass.value),
            ("target", -2.0),
            ("abs_err", diff.abs()),
            ("error_estimate", mass.error_estimate),
        ],
    )];
    let digest = fnv1a_hex(&format!("check=csch2_mass;tol={}", fmt_f64(tol)));
    Ok(CheckOutcome::from_residual(
        "csch2_mass",
        diff.abs(),
        tol,
        mass.converged,
        digest,
        rows,
    ))
}

/// Closed-form moment limits: `mu_0(eps) -> -pi` and `mu_{2m}(eps) -> 0`
/// for `m >= 1` as `eps -> 0`, evaluated down a short ladder.
fn moment_limits_check(max_m: u32, tol: f64) -> Result<CheckOutcome, ExperimentError> {
    let eps_ladder = [1e-2, 1e-5, 1e-8];
    let mut rows = Vec::new();
    let mut residual = 0.0_f64;
    for m in 0..=max_m {
        let target = if m == 0 { -std::f64::consts::PI } else { 0.0 };
        for &eps in &eps_ladder {
            let value = moments::moment_formula(m, eps / std::f64::consts::PI)?;
            let diff = value - target;
            if eps == *eps_ladder.last().unwrap() {
                residual = residual.max(diff.abs());
            }
            rows.push(DetailRow::new(
                format!("m={m},eps={eps:e}"),
                vec![("value", value), ("target", target), ("diff", diff)],
            ));
        }
    }
    let digest = fnv1a_hex(&format!("check=moment_limits;max_m={max_m};tol={}", fmt_f64(tol)));
    Ok(CheckOutcome::from_residual("moment_limits", residual, tol, true, digest, rows))
}

/// The moment asymptotic expansion against the direct dilated pairing:
/// with moments through `n_max` the remainder falls like
/// `lambda^{-(n_max + 2)}`.  The order is judged on the slope between the
/// two largest rungs; earlier gaps still feel the next correction term and
/// are reported as context only.
fn asymptotic_expansion_check(cfg: &RunConfig, tol: f64) -> Result<CheckOutcome, ExperimentError> {
    let phi = TestFunction::gaussian(0.0, 1.0)?;
    let kernel = KernelSpec::coth_eps_imag(cfg.eps);
    let n_max = 2 * cfg.max_m + 1;
    let expected_slope = -((n_max + 2) as f64);
    let lambdas = [2.0, 4.0, 8.0];

    let evals: Result<Vec<_>, ExperimentError> = lambdas
        .par_iter()
        .map(|&lambda| {
            let scaled = ScaledProbe { inner: &phi, scale: lambda };
            let direct = pair(&kernel, &scaled, 1e-10)?;
            let series = moments::moment_asymptotic_eval(&kernel, &phi, lambda, n_max, 1e-9)?;
            Ok((lambda, direct.value / lambda, series, direct.converged))
        })
        .collect();
    let evals = evals?;

    let mut rows = Vec::new();
    let mut residual = 0.0_f64;
    let mut all_converged = true;
    for (i, (lambda, direct, series, conv)) in evals.iter().enumerate() {
        let diff = (direct - series.value).abs();
        let mut slope = f64::NAN;
        if i > 0 {
            let (l0, d0, s0, _) = &evals[i - 1];
            let diff0 = (d0 - s0.value).abs();
            slope = (diff / diff0).ln() / (lambda / l0).ln();
            if i + 1 == evals.len() {
                residual = (slope - expected_slope).abs();
            }
        }
        all_converged &= *conv && series.converged;
        rows.push(DetailRow::new(
            format!("lambda={lambda}"),
            vec![
                ("direct", *direct),
                ("series", series.value),
                ("diff", diff),
                ("slope", slope),
            ],
        ));
    }
    let digest = fnv1a_hex(&format!(
        "check=asymptotic_expansion;eps={};n_max={n_max};tol={}",
        fmt_f64(cfg.eps),
        fmt_f64(tol)
    ));
    Ok(CheckOutcome::from_residual(
        "asymptotic_expansion",
        residual,
        tol,
        all_converged,
        digest,
        rows,
    ))
}

/// Delta-comb reading of the shifted kernel for slowly varying probes:
/// `<Im coth(. + i eps), phi> ~ sum_m mu_{2m}(eps) phi^(2m)(0) / (2m)!`.
fn delta_series_check(cfg: &RunConfig, tol: f64) -> Result<CheckOutcome, ExperimentError> {
    let probes =
        [TestFunction::gaussian(0.0, 6.0)?, TestFunction::gaussian(0.5, 8.0)?];
    let pair_tol = (tol * 1e-3).clamp(1e-12, 1e-9);
    let rows: Result<Vec<_>, ExperimentError> = probes
        .par_iter()
        .map(|phi| {
            let direct = pair(&KernelSpec::coth_eps_imag(cfg.eps), phi, pair_tol)?;
            let comb = moments::delta_series_pairing(phi, cfg.eps, cfg.max_m)?;
            let diff = direct.value - comb;
            Ok((
                DetailRow::new(
                    phi.label(),
                    vec![("direct", direct.value), ("comb", comb), ("diff", diff)],
                ),
                diff.abs(),
                direct.converged,
            ))
        })
        .collect();
    let rows = rows?;
    let residual = rows.iter().map(|(_, d, _)| *d).fold(0.0, f64::max);
    let all_converged = rows.iter().all(|(_, _, c)| *c);
    let digest = fnv1a_hex(&format!(
        "check=delta_series;eps={};max_m={};tol={}",
        fmt_f64(cfg.eps),
        cfg.max_m,
        fmt_f64(tol)
    ));
    Ok(CheckOutcome::from_residual(
        "delta_series",
        residual,
        tol,
        all_converged,
        digest,
        rows.into_iter().map(|(r, _, _)| r).collect(),
    ))
}

fn identity_11_12(cfg: &RunConfig) -> Result<Vec<CheckOutcome>, ExperimentError> {
    let cosh = cosh_integral_check(cfg.max_m, cfg.tol_or(1e-8))?;
    let series = sine_series_check(cfg.max_m, cfg.tol_or(1e-12))?;
    Ok(vec![cosh, series])
}

/// `int_0^inf x^{2m} / (cosh x - cos 2 pi a) dx` against its closed form
/// `2 (2m)! S(m, a) / sin(2 pi a)`.
fn cosh_integral_check(max_m: u32, tol: f64) -> Result<CheckOutcome, ExperimentError> {
    let a_grid = [0.1, 0.25, 0.4];
    let quad_tol = (tol * 1e-2).clamp(1e-13, 1e-10);
    let mut jobs = Vec::new();
    for m in 0..=max_m {
        for &a in &a_grid {
            jobs.push((m, a));
        }
    }
    let rows: Result<Vec<_>, ExperimentError> = jobs
        .par_iter()
        .map(|&(m, a)| {
            let numeric = moments::cosh_power_integral(m, a, quad_tol)?;
            let mut fact = 1.0; // (2m)!
            for k in 2..=2 * m {
                fact *= k as f64;
            }
            let closed = 2.0 * fact * moments::bernoulli_sine_series(m, a)?
                / (2.0 * std::f64::consts::PI * a).sin();
            let diff = numeric.value - closed;
            Ok((
                DetailRow::new(
                    format!("m={m},a={a}"),
                    vec![
                        ("numeric", numeric.value),
                        ("closed_form", closed),
                        ("diff", diff),
                        ("error_estimate", numeric.error_estimate),
                    ],
                ),
                diff.abs(),
                numeric.converged,
            ))
        })
        .collect();
    let rows = rows?;
    let residual = rows.iter().map(|(_, d, _)| *d).fold(0.0, f64::max);
    let all_converged = rows.iter().all(|(_, _, c)| *c);
    let digest =
        fnv1a_hex(&format!("check=cosh_integral_identity;max_m={max_m};tol={}", fmt_f64(tol)));
    Ok(CheckOutcome::from_residual(
        "cosh_integral_identity",
        residual,
        tol,
        all_converged,
        digest,
        rows.into_iter().map(|(r, _, _)| r).collect(),
    ))
}

/// The accelerated sine series `S(n, a) = sum_k sin(2 pi k a)/k^{2n+1}`
/// against its Bernoulli-polynomial closed form
/// `(-1)^{n+1} (2 pi)^{2n+1} B_{2n+1}(a) / (2 (2n+1)!)`.
fn sine_series_check(max_n: u32, tol: f64) -> Result<CheckOutcome, ExperimentError> {
    use crate::special::bernoulli::bernoulli_polynomial;
    let a_grid = [0.1, 0.25, 0.4, 0.7];
    let mut rows = Vec::new();
    let mut residual = 0.0_f64;
    for n in 0..=max_n {
        for &a in &a_grid {
            let numeric = moments::bernoulli_sine_series(n, a)?;
            let two_pi = 2.0 * std::f64::consts::PI;
            let mut fact = 1.0; // (2n+1)!
            for k in 2..=2 * n + 1 {
                fact *= k as f64;
            }
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            let closed =
                sign * two_pi.powi(2 * n as i32 + 1) * bernoulli_polynomial(2 * n + 1, a)
                    / (2.0 * fact);
            let diff = numeric - closed;
            residual = residual.max(diff.abs());
            rows.push(DetailRow::new(
                format!("n={n},a={a}"),
                vec![("numeric", numeric), ("closed_form", closed), ("diff", diff)],
            ));
        }
    }
    let digest =
        fnv1a_hex(&format!("check=sine_series_closed_form;max_n={max_n};tol={}", fmt_f64(tol)));
    Ok(CheckOutcome::from_residual(
        "sine_series_closed_form",
        residual,
        tol,
        true,
        digest,
        rows,
    ))
}

fn semiclassical(cfg: &RunConfig) -> Result<Vec<CheckOutcome>, ExperimentError> {
    let p = PhysicalParams::from_lambda(cfg.lambda, 1.0)?;
    let battery = shifted_family(&FamilySeed::default())?;
    let cutoff = CutoffSpec::default_for(p.lambda())?;
    let phi = TestFunction::gaussian(0.0, 1.0)?;
    let lambdas = [2.0 * cfg.lambda, 4.0 * cfg.lambda, 8.0 * cfg.lambda];

    let split = noise::split_check(&p, &battery, &cutoff, cfg.tol_or(1e-5))?;
    let limit = noise::semiclassical_limit(1.0, &phi, &lambdas, cfg.tol_or(0.3))?;
    let slope = moment_route_slope(&phi, &lambdas, cfg.tol_or(0.3))?;
    let routes = route_agreement(&p, &cutoff, cfg.tol_or(1e-3))?;
    Ok(vec![split, limit, slope, routes])
}

/// The `N = 0` moment route to the classical limit: the residual of
/// `<(csch^2)_st, phi(./lambda)>/lambda` against `mu_0 phi(0)/lambda`
/// falls like `lambda^{-3}` (the `mu_2` term), checked as a log-log slope.
fn moment_route_slope(
    phi: &TestFunction,
    lambdas: &[f64],
    slope_tol: f64,
) -> Result<CheckOutcome, ExperimentError> {
    let pair_tol = 1e-10;
    let mass = moments::moment(&KernelSpec::csch2(), 0, pair_tol)?;
    let phi0 = phi.eval(0.0, 0)?;
    let evals: Result<Vec<_>, ExperimentError> = lambdas
        .par_iter()
        .map(|&lambda| {
            let scaled = ScaledProbe { inner: phi, scale: lambda };
            let v = pair(&KernelSpec::csch2(), &scaled, pair_tol)?;
            Ok((lambda, v.value / lambda, v.converged))
        })
        .collect();
    let evals = evals?;

    let mut rows = Vec::new();
    let mut residual = 0.0_f64;
    let mut all_converged = mass.converged;
    for (i, (lambda, value, conv)) in evals.iter().enumerate() {
        let head = mass.value * phi0 / lambda;
        let resid = (value - head).abs();
        let mut slope = f64::NAN;
        if i > 0 {
            let (l0, v0, _) = &evals[i - 1];
            let resid0 = (v0 - mass.value * phi0 / l0).abs();
            slope = (resid / resid0).ln() / (lambda / l0).ln();
            residual = residual.max((slope + 3.0).abs());
        }
        all_converged &= *conv;
        rows.push(DetailRow::new(
            format!("lambda={lambda}"),
            vec![
                ("scaled_pairing", *value),
                ("expansion_head", head),
                ("resid", resid),
                ("slope", slope),
            ],
        ));
    }
    let ls: Vec<String> = lambdas.iter().map(|l| fmt_f64(*l)).collect();
    let digest = fnv1a_hex(&format!(
        "check=moment_route_slope;probe={};lambdas=[{}];tol={}",
        phi.label(),
        ls.join(","),
        fmt_f64(slope_tol)
    ));
    Ok(CheckOutcome::from_residual(
        "moment_route_slope",
        residual,
        slope_tol,
        all_converged,
        digest,
        rows,
    ))
}

/// Cross-check of the closed-form frequency route against the fully
/// numeric double quadrature (which also covers the bump probe, where it
/// is compared with the weak-derivative route instead).
fn route_agreement(
    p: &PhysicalParams,
    cutoff: &CutoffSpec,
    tol: f64,
) -> Result<CheckOutcome, ExperimentError> {
    let double_tol = (tol * 1e-2).max(1e-8);
    let gauss = TestFunction::gaussian(0.0, 1.0)?;
    let bump = TestFunction::bump(0.0, 2.0)?;

    let (g_row, b_row) = rayon::join(
        || -> Result<_, ExperimentError> {
            let primary = noise::autocorr_pair(p, &gauss, cutoff, double_tol)?;
            let double = noise::autocorr_pair_double(p, &gauss, cutoff, double_tol)?;
            Ok((primary, double, gauss.label()))
        },
        || -> Result<_, ExperimentError> {
            let primary = noise::autocorr_weak_route(p, &bump, (tol * 1e-3).max(1e-10))?;
            let double = noise::autocorr_pair_double(p, &bump, cutoff, double_tol)?;
            Ok((primary, double, bump.label()))
        },
    );
    let mut rows = Vec::new();
    let mut residual = 0.0_f64;
    let mut all_converged = true;
    for (primary, double, label) in [g_row?, b_row?] {
        let diff = primary.value - double.value;
        residual = residual.max(diff.abs());
        all_converged &= primary.converged && double.converged;
        rows.push(DetailRow::new(
            label,
            vec![
                ("primary_route", primary.value),
                ("double_quadrature", double.value),
                ("diff", diff),
            ],
        ));
    }
    let digest = fnv1a_hex(&format!(
        "check=route_agreement;kt={};hbar={};zeta={};cutoff={};tol={}",
        fmt_f64(p.kt),
        fmt_f64(p.hbar),
        fmt_f64(p.zeta),
        cutoff.digest_string(),
        fmt_f64(tol)
    ));
    Ok(CheckOutcome::from_residual(
        "route_agreement",
        residual,
        tol,
        all_converged,
        digest,
        rows,
    ))
}

fn series_accuracy(cfg: &RunConfig) -> Result<Vec<CheckOutcome>, ExperimentError> {
    let series = series_convergence_check(cfg.tol_or(1e-10))?;
    let sign = sign_decomposition_check(cfg.tol_or(1e-13))?;
    Ok(vec![series, sign])
}

/// Truncated partial-fraction series with closed-form tail correction
/// against the direct evaluations, on a grid across `[0.1, 5]`.
fn series_convergence_check(tol: f64) -> Result<CheckOutcome, ExperimentError> {
    use crate::special::{coth_direct, coth_series, csch2_direct, csch2_series};
    let trunc = SeriesTruncation::new(1_000_000, true)?;
    let grid = [0.1, 0.25, 0.5, 1.0, 2.0, 3.7, 5.0];
    let mut rows = Vec::new();
    let mut residual = 0.0_f64;
    for &y in &grid {
        let direct = coth_direct(y)?;
        let series = coth_series(y, trunc)?;
        let diff = series - direct;
        residual = residual.max(diff.abs());
        rows.push(DetailRow::new(
            format!("coth[y={y}]"),
            vec![("direct", direct), ("series", series), ("diff", diff)],
        ));
    }
    for &y in &grid {
        let direct = csch2_direct(y)?;
        let series = csch2_series(y, trunc)?;
        let diff = series - direct;
        residual = residual.max(diff.abs());
        rows.push(DetailRow::new(
            format!("csch2[y={y}]"),
            vec![("direct", direct), ("series", series), ("diff", diff)],
        ));
    }
    let digest = fnv1a_hex(&format!(
        "check=series_convergence;k={};tail=true;tol={}",
        1_000_000,
        fmt_f64(tol)
    ));
    Ok(CheckOutcome::from_residual("series_convergence", residual, tol, true, digest, rows))
}

/// `coth y = sign(y) + bounded remainder` must reproduce `coth` to
/// near machine precision, relatively, across many scales.
fn sign_decomposition_check(tol: f64) -> Result<CheckOutcome, ExperimentError> {
    use crate::special::{coth_direct, decompose_sign};
    let mut rows = Vec::new();
    let mut residual = 0.0_f64;
    let mut y = 1e-3;
    while y <= 20.0 {
        for s in [-1.0, 1.0] {
            let v = s * y;
            let direct = coth_direct(v)?;
            let split = decompose_sign(v)?;
            let rel = (split - direct).abs() / direct.abs();
            residual = residual.max(rel);
            rows.push(DetailRow::new(
                format!("y={v:e}"),
                vec![("direct", direct), ("decomposed", split), ("rel_diff", rel)],
            ));
        }
        y *= 10.0_f64.powf(0.25);
    }
    let digest = fnv1a_hex(&format!("check=sign_decomposition;tol={}", fmt_f64(tol)));
    Ok(CheckOutcome::from_residual("sign_decomposition", residual, tol, true, digest, rows))
}

fn eps_decomposition(cfg: &RunConfig) -> Result<Vec<CheckOutcome>, ExperimentError> {
    let phi = TestFunction::gaussian(0.0, 1.0)?;
    let trunc = SeriesTruncation::new(200, true)?;
    let split = pairing::coth_eps_decomposition_check(
        &phi,
        trunc,
        cfg.eps_ladder[0],
        cfg.tol_or(1e-6),
    )?;
    let nascent = nascent_delta_check(cfg, cfg.tol_or(1e-6))?;
    Ok(vec![split, nascent])
}

/// The nascent-delta limit for three probes:
/// `<Im coth(. + i eps), phi> -> -pi phi(0)` along the eps ladder.
fn nascent_delta_check(cfg: &RunConfig, tol: f64) -> Result<CheckOutcome, ExperimentError> {
    let ladder = cfg.eps_ladder_spec()?;
    let probes = [
        TestFunction::gaussian(0.0, 1.0)?,
        TestFunction::gaussian(0.5, 1.0)?,
        TestFunction::bump(0.0, 2.0)?,
    ];
    let rows: Result<Vec<_>, ExperimentError> = probes
        .par_iter()
        .map(|phi| {
            let ex = pair_with_ladder(KernelKind::CothEpsImag, phi, &ladder, tol)?;
            let target = -std::f64::consts::PI * phi.eval(0.0, 0)?;
            let diff = ex.value - target;
            Ok((
                DetailRow::new(
                    phi.label(),
                    vec![
                        ("extrapolated", ex.value),
                        ("target", target),
                        ("diff", diff),
                        ("error_estimate", ex.error_estimate),
                    ],
                ),
                diff.abs(),
                ex.converged,
            ))
        })
        .collect();
    let rows = rows?;
    let residual = rows.iter().map(|(_, d, _)| *d).fold(0.0, f64::max);
    let all_converged = rows.iter().all(|(_, _, c)| *c);
    let digest = fnv1a_hex(&format!(
        "check=nascent_delta;ladder={};tol={}",
        ladder.digest_string(),
        fmt_f64(tol)
    ));
    Ok(CheckOutcome::from_residual(
        "nascent_delta",
        residual,
        tol,
        all_converged,
        digest,
        rows.into_iter().map(|(r, _, _)| r).collect(),
    ))
}
