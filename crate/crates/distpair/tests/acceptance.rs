//! Acceptance suite: every published criterion of the artifact, one test
//! each, with its stated tolerance and runtime budget.  Each test prints a
//! single `acceptance N PASS/FAIL` line (visible under `--nocapture`).

use std::time::Instant;

use distpair::config::{Experiment, RunConfig};
use distpair::moments::{self, MomentTable};
use distpair::noise::{self, CutoffSpec, PhysicalParams};
use distpair::pairing::{self, extrapolate_limit, pair, pair_with_ladder, PairingResult};
use distpair::probes::{shifted_family, DerivProbe, FamilySeed, LinCombProbe};
use distpair::special;
use distpair::{
    run_experiment, CheckOutcome, KernelKind, KernelSpec, LadderSpec, TestFunction, Verdict,
};

fn verdict_line(num: u32, ok: bool, detail: &str) {
    println!("acceptance {num} {}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {num} failed: {detail}");
}

fn within_budget(num: u32, start: Instant, budget_s: u64) {
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < budget_s,
        "criterion {num} runtime {elapsed:?} exceeded {budget_s}s budget"
    );
}

fn row_value(outcome: &CheckOutcome, label_part: &str, column: &str) -> f64 {
    let row = outcome
        .details
        .iter()
        .find(|r| r.label.contains(label_part))
        .unwrap_or_else(|| panic!("no row labelled '*{label_part}*' in {}", outcome.name));
    row.values
        .iter()
        .find(|(k, _)| *k == column)
        .unwrap_or_else(|| panic!("no column '{column}' in row '{}'", row.label))
        .1
}

/// 1. Weak-derivative verdict: `max |Delta(phi)| < 1e-6` over the default
/// battery, while the spurious-term residual `Delta - 2 phi(0)` sits at
/// `-2` (within 1e-4) for the origin-centered unit gaussian.  Under 10 s.
#[test]
fn criterion_1_derivative_verdict() {
    let start = Instant::now();
    let battery = shifted_family(&FamilySeed::default()).unwrap();
    let out = pairing::check_derivative_identity(&battery, 1e-6).unwrap();
    let sign_residual = row_value(&out, "gaussian(c=0,w=1)", "sign_residual");
    let banded = (1.9999..=2.0001).contains(&sign_residual.abs());
    let ok = out.verdict == Verdict::Pass && out.residual < 1e-6 && banded;
    within_budget(1, start, 10);
    verdict_line(
        1,
        ok,
        &format!(
            "derivative identity: max residual {:.3e} (tol 1e-6), \
             spurious-term residual {sign_residual:.6} in [-2.0001, -1.9999]",
            out.residual
        ),
    );
}

/// 2. The standardized `csch^2` mass: `mu_0 = -2` to 1e-8.  Under 5 s.
#[test]
fn criterion_2_csch2_mass() {
    let start = Instant::now();
    let mu0 = moments::moment(&KernelSpec::csch2(), 0, 1e-9).unwrap();
    let err = (mu0.value + 2.0).abs();
    let ok = mu0.converged && err < 1e-8;
    within_budget(2, start, 5);
    verdict_line(2, ok, &format!("mu_0[(csch^2)_st] = {} (|err| = {err:.3e}, tol 1e-8)", mu0.value));
}

/// 3. Nascent delta: the eps-ladder extrapolation of
/// `<Im coth(. + i eps), phi>` reaches `-pi phi(0)` to 1e-6 for three
/// distinct probes.  Under 10 s.
#[test]
fn criterion_3_nascent_delta() {
    let start = Instant::now();
    let probes = [
        TestFunction::gaussian(0.0, 1.0).unwrap(),
        TestFunction::gaussian(0.5, 1.0).unwrap(),
        TestFunction::bump(0.0, 2.0).unwrap(),
    ];
    let ladder = LadderSpec::default_eps();
    let mut worst = 0.0_f64;
    let mut all_ok = true;
    for phi in &probes {
        let ex = pair_with_ladder(KernelKind::CothEpsImag, phi, &ladder, 1e-7).unwrap();
        let target = -std::f64::consts::PI * phi.eval(0.0, 0).unwrap();
        let diff = (ex.value - target).abs();
        worst = worst.max(diff);
        all_ok &= ex.converged && diff < 1e-6;
    }
    within_budget(3, start, 10);
    verdict_line(
        3,
        all_ok,
        &format!("eps-ladder limit -> -pi phi(0) for 3 probes, worst |diff| {worst:.3e} (tol 1e-6)"),
    );
}

/// 4. The cosh-power integral equals its sine-series closed form to 1e-8
/// on the (m, a) grid, and the `(m=0, a=1/4)` case equals `pi/2` to 1e-10.
/// Under 10 s.
#[test]
fn criterion_4_cosh_integral() {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut all_ok = true;
    for m in [0u32, 1, 2] {
        for a in [0.1, 0.25, 0.4] {
            let numeric = moments::cosh_power_integral(m, a, 1e-11).unwrap();
            let mut fact = 1.0;
            for k in 2..=2 * m {
                fact *= k as f64;
            }
            let closed = 2.0 * fact * moments::bernoulli_sine_series(m, a).unwrap()
                / (2.0 * std::f64::consts::PI * a).sin();
            let diff = (numeric.value - closed).abs();
            worst = worst.max(diff);
            all_ok &= numeric.converged && diff < 1e-8;
        }
    }
    let anchor = moments::cosh_power_integral(0, 0.25, 1e-12).unwrap();
    let anchor_err = (anchor.value - std::f64::consts::FRAC_PI_2).abs();
    all_ok &= anchor_err < 1e-10;
    within_budget(4, start, 10);
    verdict_line(
        4,
        all_ok,
        &format!(
            "cosh integral vs closed form: worst |diff| {worst:.3e} (tol 1e-8); \
             (m=0, a=1/4) hits pi/2 with |err| {anchor_err:.3e} (tol 1e-10)"
        ),
    );
}

/// 5. Moment table: numeric `mu_{2m}(eps)` matches the Bernoulli closed
/// form to 1e-7 for `m <= 3` at `eps in {0.3, 0.1}`, odd moments vanish
/// below 1e-9, and the closed forms flow to `-pi` (m=0) and `0` (m >= 1)
/// as `eps -> 0`.
#[test]
fn criterion_5_moment_closed_forms() {
    let table = MomentTable::build(&[0.3, 0.1], 7, 1e-8).unwrap();
    let mut worst_even = 0.0_f64;
    let mut worst_odd = 0.0_f64;
    let mut all_ok = true;
    for row in &table.rows {
        all_ok &= row.converged;
        if row.n % 2 == 0 {
            worst_even = worst_even.max(row.abs_err);
            all_ok &= row.abs_err < 1e-7;
        } else {
            worst_odd = worst_odd.max(row.numeric.abs());
            all_ok &= row.numeric.abs() < 1e-9;
        }
    }
    let mut limits_ok = true;
    for m in 0..=3u32 {
        let target = if m == 0 { -std::f64::consts::PI } else { 0.0 };
        let coarse = (moments::moment_formula(m, 1e-3 / std::f64::consts::PI).unwrap() - target).abs();
        let fine = (moments::moment_formula(m, 1e-8 / std::f64::consts::PI).unwrap() - target).abs();
        limits_ok &= fine < coarse && fine < 1e-4;
    }
    all_ok &= limits_ok;
    verdict_line(
        5,
        all_ok,
        &format!(
            "moments vs Bernoulli closed forms: worst even |err| {worst_even:.3e} (tol 1e-7), \
             worst odd {worst_odd:.3e} (tol 1e-9), eps -> 0 limits flow to -pi / 0: {limits_ok}"
        ),
    );
}

/// 6. Noise-kernel split at `lambda = 5`, `kT = zeta = 1`: the pairing
/// `<K, phi>` splits into the vanishing quantum part plus the classical
/// `2 kT zeta phi(0)`, and the three computational routes agree — all
/// within 1e-5 relative across the whole battery.  Under 60 s.
#[test]
fn criterion_6_autocorr_split() {
    let start = Instant::now();
    let p = PhysicalParams::from_lambda(5.0, 1.0).unwrap();
    let battery = shifted_family(&FamilySeed::default()).unwrap();
    let cutoff = CutoffSpec::default_for(p.lambda()).unwrap();
    let out = noise::split_check(&p, &battery, &cutoff, 1e-5).unwrap();
    let ok = out.verdict == Verdict::Pass && out.residual < 1e-5;
    within_budget(6, start, 60);
    verdict_line(
        6,
        ok,
        &format!(
            "split + three-route agreement across {} probes: max relative residual {:.3e} (tol 1e-5)",
            out.details.len(),
            out.residual
        ),
    );
}

/// 7. Classical limit: the `N = 0` moment-route residual decays with
/// log-log slope `-3 +/- 0.3` over `lambda in {10, 20, 40}`, and the full
/// pairing tends to `2 kT zeta phi(0)` with monotone residual decay.
#[test]
fn criterion_7_semiclassical() {
    let mut cfg = RunConfig::default();
    cfg.experiments = vec![Experiment::Semiclassical];
    let outcomes = run_experiment(Experiment::Semiclassical, &cfg).unwrap();
    let slope = outcomes.iter().find(|o| o.name == "moment_route_slope").unwrap();
    let limit = outcomes.iter().find(|o| o.name == "semiclassical_limit").unwrap();
    // Monotone approach is enforced inside the check (residual becomes
    // infinite when violated), so PASS already certifies it.
    let ok = slope.verdict == Verdict::Pass
        && slope.residual <= 0.3
        && limit.verdict == Verdict::Pass
        && limit.residual <= 0.3;
    verdict_line(
        7,
        ok,
        &format!(
            "moment-route slope -3 within {:.3e} (tol 0.3); \
             white-noise limit slope -2 within {:.3e}, monotone",
            slope.residual, limit.residual
        ),
    );
}

/// 8. Series accuracy: the truncated partial-fraction series with tail
/// correction reproduce the direct evaluations to 1e-10 across
/// `y in [0.1, 5]` at `K = 1e6`, and the sign decomposition reproduces
/// `coth` to 1e-13 relative.
#[test]
fn criterion_8_series_accuracy() {
    let trunc = special::SeriesTruncation::new(1_000_000, true).unwrap();
    let mut worst_series = 0.0_f64;
    for &y in &[0.1, 0.3, 0.7, 1.0, 1.9, 3.1, 4.2, 5.0] {
        let c = (special::coth_series(y, trunc).unwrap() - special::coth_direct(y).unwrap()).abs();
        let s = (special::csch2_series(y, trunc).unwrap() - special::csch2_direct(y).unwrap()).abs();
        worst_series = worst_series.max(c).max(s);
    }
    let mut worst_rel = 0.0_f64;
    let mut y = 1e-3;
    while y <= 20.0 {
        for v in [-y, y] {
            let direct = special::coth_direct(v).unwrap();
            let rel = (special::decompose_sign(v).unwrap() - direct).abs() / direct.abs();
            worst_rel = worst_rel.max(rel);
        }
        y *= 2.0;
    }
    let ok = worst_series < 1e-10 && worst_rel < 1e-13;
    verdict_line(
        8,
        ok,
        &format!(
            "series with tail at K=1e6: worst |diff| {worst_series:.3e} (tol 1e-10); \
             sign decomposition worst relative {worst_rel:.3e} (tol 1e-13)"
        ),
    );
}

/// 9. Property suite, compact deterministic edition: parity annihilation,
/// pairing linearity, weak-derivative definitional consistency,
/// extrapolation stability, and report determinism.  (The randomized
/// versions live in the `properties` test target.)
#[test]
fn criterion_9_properties() {
    // Parity: odd kernel against even probe, even kernel against odd probe.
    let even = TestFunction::gaussian(0.0, 1.0).unwrap();
    let odd = TestFunction::hermite(1, 0.0, 1.0).unwrap();
    let a = pair(&KernelSpec::coth(), &even, 1e-9).unwrap();
    let b = pair(&KernelSpec::csch2(), &odd, 1e-9).unwrap();
    let parity_ok = a.value.abs() < 1e-12 && b.value.abs() < 1e-12;

    // Linearity with fixed coefficients.
    let p = TestFunction::gaussian(0.5, 1.0).unwrap();
    let q = TestFunction::hermite(2, 0.0, 1.0).unwrap();
    let comb = LinCombProbe { a: 1.25, p: &p, b: -0.75, q: &q };
    let lhs = pair(&KernelSpec::coth(), &comb, 1e-10).unwrap();
    let rhs = 1.25 * pair(&KernelSpec::coth(), &p, 1e-10).unwrap().value
        - 0.75 * pair(&KernelSpec::coth(), &q, 1e-10).unwrap().value;
    let linearity_ok = (lhs.value - rhs).abs() < 1e-8;

    // Weak derivative of the Langevin kernel against its classical
    // derivative `-(csch^2 y - 1/y^2)`, which is bounded and integrable.
    let phi = TestFunction::gaussian(0.3, 1.0).unwrap();
    let weak = pairing::weak_derivative_pair(&KernelSpec::langevin(), &phi, 1e-10).unwrap();
    let mut f = |y: f64| -special::csch2_minus_inv_y2(y) * phi.eval(y, 0).unwrap();
    let pts: Vec<f64> = vec![-9.0, -2.0, -0.5, 0.0, 0.5, 2.0, 9.0];
    let classical = distpair::quad::integrate(&mut f, &pts, 1e-11, 20_000);
    let weak_ok = (weak.value - classical.value).abs() < 1e-8;

    // Extrapolating constant rungs returns the constant.
    let ladder = LadderSpec::default_eps();
    let rungs: Vec<PairingResult> = ladder
        .values
        .iter()
        .map(|_| PairingResult { value: 0.7, error_estimate: 1e-14, nodes_used: 1, converged: true })
        .collect();
    let ex = extrapolate_limit(&rungs, &ladder).unwrap();
    let extrap_ok = (ex.value - 0.7).abs() < 1e-12;

    // Byte-identical reports for identical inputs.
    let mut cfg = RunConfig::default();
    cfg.experiments = vec![Experiment::SeriesAccuracy];
    let once = distpair::report::render_json(&distpair::run(&cfg).unwrap());
    let twice = distpair::report::render_json(&distpair::run(&cfg).unwrap());
    let determinism_ok = once == twice;

    let ok = parity_ok && linearity_ok && weak_ok && extrap_ok && determinism_ok;
    verdict_line(
        9,
        ok,
        &format!(
            "parity {parity_ok}, linearity {linearity_ok}, weak-derivative {weak_ok}, \
             extrapolation {extrap_ok}, determinism {determinism_ok}"
        ),
    );
}

/// The derivative check also underlies criterion 1's probe-by-probe rows:
/// every battery row must carry the `Delta` and spurious-term columns the
/// report promises.
#[test]
fn report_rows_carry_delta_and_sign_columns() {
    let battery = shifted_family(&FamilySeed::default()).unwrap();
    let out = pairing::check_derivative_identity(&battery, 1e-6).unwrap();
    assert_eq!(out.details.len(), battery.len());
    for row in &out.details {
        for col in ["weak_coth_derivative", "csch2_pairing", "delta", "sign_residual"] {
            assert!(row.values.iter().any(|(k, _)| *k == col), "missing {col}");
        }
    }
    // For every probe the spurious-term residual equals Delta - 2 phi(0);
    // with Delta ~ 0 it sits at -2 phi(0).
    let battery_phi0: Vec<f64> = battery.iter().map(|p| p.eval(0.0, 0).unwrap()).collect();
    for (row, phi0) in out.details.iter().zip(battery_phi0) {
        let delta = row.values.iter().find(|(k, _)| *k == "delta").unwrap().1;
        let sign = row.values.iter().find(|(k, _)| *k == "sign_residual").unwrap().1;
        assert!((sign - (delta - 2.0 * phi0)).abs() < 1e-12);
    }
}

/// The definitional equation `<T', phi> = -<T, phi'>` holds verbatim
/// through the public API, for a genuinely singular kernel.
#[test]
fn weak_derivative_is_definitionally_consistent() {
    let phi = TestFunction::gaussian(0.0, 2.0).unwrap();
    let weak = pairing::weak_derivative_pair(&KernelSpec::coth(), &phi, 1e-9).unwrap();
    let dphi = DerivProbe { inner: &phi, shift: 1 };
    let direct = pair(&KernelSpec::coth(), &dphi, 1e-9).unwrap();
    assert!((weak.value + direct.value).abs() < 1e-12);
}
