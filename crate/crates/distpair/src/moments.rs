//! Moments of the regularized kernels and their Bernoulli closed forms.
//!
//! The `n`-th moment of a kernel `T` is `mu_n = <T, y^n>`, read through a
//! Gaussian window `y^n e^{-(y/R)^2}` whose radius is sent to infinity.
//! Because `e^{-(y/R)^2}` expands in powers of `1/R^2`, the windowed pairing
//! is (for kernels with all moments finite) a polynomial-plus-remainder in
//! `1/R^2`, so a five-rung radius ladder extrapolates cleanly to the bare
//! moment.  The one exception to the ladder is the `(csch^2)_st` mass
//! `mu_0`, which has an exact subtracted form with a closed tail and needs
//! no window at all.  Only kernels that decay keep finite moments:
//! `(csch^2)_st` and the nascent comb `Im coth(y + i eps)` qualify; `coth`,
//! `1/y`, `1/y^2`, `langevin`, and `Re coth(y + i eps)` do not, and asking
//! for their moments is an error, not a number.
//!
//! The closed forms are Bernoulli-polynomial identities.  With `a = eps/pi`
//! in `(0, 1/2)`:
//!
//! ```text
//! mu_{2m}(eps) = <Im coth(. + i eps), y^{2m}>
//!              = (-1)^m 2 pi^{2m+1} B_{2m+1}(a) / (2m + 1),
//! ```
//!
//! so `mu_0(eps) = 2 eps - pi` (the nascent `-pi delta` plus its linear
//! correction) and every higher even moment vanishes as `eps -> 0`.  The
//! identity chain behind it runs through the classical integral
//!
//! ```text
//! int_0^inf x^{2m} / (cosh x - cos 2 pi a) dx
//!     = 2 (2m)! / sin(2 pi a) * S(m, a),
//! S(m, a) = sum_{k>=1} sin(2 pi k a) / k^{2m+1}
//!         = (-1)^{m+1} (2 pi)^{2m+1} B_{2m+1}(a) / (2 (2m+1)!),
//! ```
//!
//! and this module computes all three members independently: the integral
//! by quadrature, the sine series by summation-by-parts acceleration (the
//! series is only conditionally convergent for `m = 0`; naive partial sums
//! are hopeless), and the Bernoulli side exactly.  For `(csch^2)_st` the
//! landmark values are `mu_0 = -2` — the standardized kernel carries total
//! mass `-2`, which is precisely why no `2 delta` correction belongs in the
//! `coth` derivative — and `mu_2 = pi^2/3`.
//!
//! Small-`eps` expansions close the loop: `c_m = mu_{2m}(eps) / (2m)!`
//! turns the moment table into the delta-comb expansion
//! `<Im coth(. + i eps), phi> ~ sum_m c_m phi^(2m)(0)`, evaluated here for
//! slowly varying probes and checked against direct pairings.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::outcome::{fnv1a_hex, CheckOutcome, DetailRow};
use crate::pairing::{
    extrapolate_limit, pair, KernelKind, KernelSpec, LadderSpec, PairingError, PairingResult,
    Regularization,
};
use crate::probes::{self, Probe, ProbeError};
use crate::quad;
use crate::report::fmt_f64;
use crate::special::bernoulli::bernoulli_polynomial;

/// Radius ladder for the Gaussian moment windows.
const WINDOW_RADII: [f64; 5] = [10.0, 20.0, 40.0, 80.0, 160.0];
/// Largest `m` for which the delta-comb expansion is offered.
pub const MAX_COMB_ORDER: u32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum MomentError {
    /// The kernel does not decay; its moments are not finite numbers.
    Divergent { kind: KernelKind, n: u32 },
    /// Moments are defined for concrete kernels, not for eps-limits.
    UnsupportedRegularization { kind: KernelKind },
    InvalidParameter { what: &'static str },
    Pairing(PairingError),
}

impl std::fmt::Display for MomentError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MomentError::Divergent { kind, n } => write!(
                f,
                "moment {} of kernel '{}' diverges (kernel does not decay)",
                n,
                kind.as_str()
            ),
            MomentError::UnsupportedRegularization { kind } => write!(
                f,
                "moments of '{}' need a fixed eps, not an eps-limit",
                kind.as_str()
            ),
            MomentError::InvalidParameter { what } => write!(f, "invalid parameter: {what}"),
            MomentError::Pairing(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for MomentError {}

impl From<PairingError> for MomentError {
    fn from(e: PairingError) -> Self {
        MomentError::Pairing(e)
    }
}
impl From<ProbeError> for MomentError {
    fn from(e: ProbeError) -> Self {
        MomentError::Pairing(PairingError::Probe(e))
    }
}

/// The window probe `y^n e^{-(y/r)^2}`.
///
/// Support runs to `11 r` rather than the Gaussian family's `8.5 r`: the
/// power `y^n` amplifies the far tail, and at `n = 8`, `r = 160` the extra
/// margin is what keeps the truncated mass below the rung tolerances.
struct WindowProbe {
    n: u32,
    r: f64,
}

impl Probe for WindowProbe {
    fn eval(&self, y: f64, order: u32) -> Result<f64, ProbeError> {
        if order > probes::MAX_DERIV_ORDER {
            return Err(ProbeError::DerivativeOrderTooLarge {
                requested: order,
                max: probes::MAX_DERIV_ORDER,
            });
        }
        // Product rule on y^n * G(y), G = e^{-(y/r)^2}:
        // G^(m)(y) = (-1/r)^m H_m(y/r) e^{-(y/r)^2}.
        let mut sum = 0.0;
        let mut binom = 1.0; // C(order, j)
        let mut falling = 1.0; // n! / (n-j)!
        for j in 0..=order.min(self.n) {
            if j > 0 {
                binom *= (order - j + 1) as f64 / j as f64;
                falling *= (self.n - j + 1) as f64;
            }
            let g = probes::hermite_gaussian_deriv(0, y / self.r, order - j)
                * (-1.0 / self.r).powi((order - j) as i32);
            sum += binom * falling * y.powi((self.n - j) as i32) * g;
        }
        Ok(sum)
    }
    fn support(&self) -> (f64, f64) {
        (-11.0 * self.r, 11.0 * self.r)
    }
    fn max_order(&self) -> u32 {
        probes::MAX_DERIV_ORDER
    }
    fn label(&self) -> String {
        format!("window(n={},R={})", self.n, self.r)
    }
}

/// `mu_n = <T, y^n>` by windowed pairing and radius extrapolation.
pub fn moment(t: &KernelSpec, n: u32, tol: f64) -> Result<PairingResult, MomentError> {
    t.validate()?;
    match t.kind {
        KernelKind::Delta => Ok(PairingResult {
            value: if n == 0 { 1.0 } else { 0.0 },
            error_estimate: 0.0,
            nodes_used: 0,
            converged: true,
        }),
        KernelKind::Csch2 => {
            if n % 2 == 1 {
                // Even kernel against an odd monomial: zero by parity.
                return Ok(PairingResult {
                    value: 0.0,
                    error_estimate: 0.0,
                    nodes_used: 0,
                    converged: true,
                });
            }
            if n == 0 {
                return Ok(csch2_mass(tol));
            }
            // For n >= 2 the monomial kills the finite-part surgery:
            // y^n (csch^2)_st = y^{n-2} (y csch y)^2 pointwise, a bounded
            // exponentially decaying integrand.  Going through the generic
            // finite-part pairing instead would split ~6 into two ~10^6
            // halves at the largest window radius and drown in roundoff.
            let rung_tol = (tol * 1e-2).max(1e-13);
            let rungs: Vec<PairingResult> = WINDOW_RADII
                .iter()
                .map(|&r| {
                    let mut f = |y: f64| {
                        let yc = y_csch(y);
                        2.0 * y.powi(n as i32 - 2)
                            * yc
                            * yc
                            * (-(y / r) * (y / r)).exp()
                    };
                    let q =
                        quad::integrate(&mut f, &[0.0, 0.5, 2.0, 8.0, 20.0, 60.0], rung_tol, 20_000);
                    PairingResult {
                        value: q.value,
                        error_estimate: q.error,
                        nodes_used: q.nodes,
                        converged: q.converged,
                    }
                })
                .collect();
            let ex = extrapolate_limit(&rungs, &radius_ladder())?;
            Ok(PairingResult { converged: ex.converged && ex.error_estimate <= tol, ..ex })
        }
        KernelKind::CothEpsImag => {
            if t.regularization == Regularization::EpsLimit {
                return Err(MomentError::UnsupportedRegularization { kind: t.kind });
            }
            let rung_tol = (tol * 1e-2).max(1e-12);
            let rungs: Result<Vec<_>, PairingError> = WINDOW_RADII
                .iter()
                .map(|&r| pair(t, &WindowProbe { n, r }, rung_tol))
                .collect();
            let ex = extrapolate_limit(&rungs?, &radius_ladder())?;
            Ok(PairingResult { converged: ex.converged && ex.error_estimate <= tol, ..ex })
        }
        other => Err(MomentError::Divergent { kind: other, n }),
    }
}

fn radius_ladder() -> LadderSpec {
    let x: Vec<f64> = WINDOW_RADII.iter().map(|r| 1.0 / (r * r)).collect();
    LadderSpec::new(x, WINDOW_RADII.len() - 1).expect("static ladder")
}

/// `y / sinh y`: 1 at the origin, underflows gracefully to 0.
fn y_csch(y: f64) -> f64 {
    if y == 0.0 {
        return 1.0;
    }
    let s = y.sinh();
    if s.is_infinite() {
        0.0
    } else {
        y / s
    }
}

/// `mu_0 of (csch^2)_st = -2`, computed without any window: the subtracted
/// integral over `[0, T]` plus its exact tail
/// `int_T^inf (csch^2 - 1/y^2) dy = coth T - 1 - 1/T`, doubled for the two
/// sides.  The finite part of `1/y^2` against the constant `1` is exactly
/// zero by the symmetric-limit definition, so nothing else contributes.
fn csch2_mass(tol: f64) -> PairingResult {
    const T: f64 = 60.0;
    let mut f = |y: f64| crate::special::csch2_minus_inv_y2(y);
    let q = quad::integrate(&mut f, &[0.0, 0.5, 2.0, 8.0, 20.0, T], 0.5 * tol, 20_000);
    let tail = 2.0 * (2.0 / (2.0 * T).exp_m1()) - 2.0 / T;
    let value = 2.0 * q.value + tail;
    PairingResult {
        value,
        error_estimate: 2.0 * q.error,
        nodes_used: q.nodes,
        converged: q.converged && value.is_finite() && 2.0 * q.error <= tol,
    }
}

/// Closed form `mu_{2m}(eps) = (-1)^m 2 pi^{2m+1} B_{2m+1}(a) / (2m+1)`
/// with `a = eps/pi` in `(0, 1/2)`.
pub fn moment_formula(m: u32, a: f64) -> Result<f64, MomentError> {
    if !(a > 0.0 && a < 0.5) {
        return Err(MomentError::InvalidParameter { what: "moment_formula needs 0 < a < 1/2" });
    }
    let n = 2 * m + 1;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * 2.0 * PI.powi(n as i32) * bernoulli_polynomial(n, a) / n as f64)
}

/// `int_0^inf x^{2m} / (cosh x - cos 2 pi a) dx`, written with the stable
/// denominator `2 (sinh^2(x/2) + sin^2(pi a))`.  Defined for `a` in `(0, 1)`
/// except `a = 1/2`, where the companion closed form `2 (2m)!/sin(2 pi a)
/// * S(m, a)` degenerates to `0/0`.
pub fn cosh_power_integral(m: u32, a: f64, tol: f64) -> Result<PairingResult, MomentError> {
    if !(a > 0.0 && a < 1.0) || !a.is_finite() {
        return Err(MomentError::InvalidParameter { what: "cosh_power_integral needs 0 < a < 1" });
    }
    if (a - 0.5).abs() < 1e-9 {
        return Err(MomentError::InvalidParameter {
            what: "cosh_power_integral is indeterminate against its closed form at a = 1/2",
        });
    }
    let s2 = (a * PI).sin().powi(2);
    let p = 2.0 * (a * PI).sin().abs();
    let mut f = |x: f64| x.powi(2 * m as i32) / (2.0 * ((0.5 * x).sinh().powi(2) + s2));
    let big = 120.0;
    let mut pts = vec![0.0, p.min(1.0), (4.0 * p).min(10.0), 1.0, 5.0, 20.0, big];
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let q = quad::integrate(&mut f, &pts, tol, 20_000);
    Ok(PairingResult {
        value: q.value,
        error_estimate: q.error,
        nodes_used: q.nodes,
        converged: q.converged,
    })
}

/// `S(n, a) = sum_{k>=1} sin(2 pi k a) / k^{2n+1}` by direct head plus a
/// summation-by-parts tail.
///
/// The tail `sum_{k>=M} c_k z^k` with `z = e^{2 pi i a}` obeys
/// `(1-z) T_j = d_j(M) z^M + z T_{j+1}` where `d_j` is the `j`-th forward
/// difference of `c_k = k^{-s}`; truncating at depth 12 leaves a remainder
/// far below f64 resolution for `M = 201`.  At `a = 0` every sine term
/// vanishes for `n >= 1`, but for `n = 0` the series value jumps (its
/// `a -> 0+` limit is `pi/2`, the value at `0` is `0`), so that point is
/// refused rather than silently resolved.
pub fn bernoulli_sine_series(n: u32, a: f64) -> Result<f64, MomentError> {
    if !(0.0..1.0).contains(&a) {
        return Err(MomentError::InvalidParameter { what: "bernoulli_sine_series needs 0 <= a < 1" });
    }
    if a == 0.0 {
        return if n >= 1 {
            Ok(0.0)
        } else {
            Err(MomentError::InvalidParameter {
                what: "S(0, a) is discontinuous at a = 0; refuse the boundary point",
            })
        };
    }
    let s = (2 * n + 1) as i32;
    const M: usize = 201;
    const DEPTH: usize = 12;
    let theta = 2.0 * PI * a;

    let mut head = 0.0;
    for k in (1..M).rev() {
        head += (theta * k as f64).sin() / (k as f64).powi(s);
    }

    // Forward differences d_j(M) of c_k = k^{-s}.
    let mut col: Vec<f64> = (0..=DEPTH).map(|i| ((M + i) as f64).powi(-s)).collect();
    let mut dm = Vec::with_capacity(DEPTH);
    for _ in 0..DEPTH {
        dm.push(col[0]);
        for i in 0..col.len() - 1 {
            col[i] = col[i + 1] - col[i];
        }
        col.pop();
    }

    let (zr, zi) = (theta.cos(), theta.sin());
    let (zmr, zmi) = ((M as f64 * theta).cos(), (M as f64 * theta).sin());
    let (omr, omi) = (1.0 - zr, -zi);
    let den = omr * omr + omi * omi;
    let (mut tr, mut ti) = (0.0_f64, 0.0_f64);
    for j in (0..DEPTH).rev() {
        let nr = dm[j] * zmr + zr * tr - zi * ti;
        let ni = dm[j] * zmi + zr * ti + zi * tr;
        tr = (nr * omr + ni * omi) / den;
        ti = (ni * omr - nr * omi) / den;
    }
    Ok(head + ti)
}

/// Head of the large-`lambda` expansion
/// `<T, phi(./lambda)>/lambda ~ sum_{n<=n_max} mu_n phi^(n)(0) / (n! lambda^{n+1})`.
///
/// The error estimate covers the computed moments only; the `n`-truncation
/// remainder is exactly what slope checks downstream are designed to see.
pub fn moment_asymptotic_eval(
    t: &KernelSpec,
    phi: &dyn Probe,
    lambda: f64,
    n_max: u32,
    tol: f64,
) -> Result<PairingResult, MomentError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(MomentError::InvalidParameter { what: "lambda must be positive and finite" });
    }
    let mut value = 0.0;
    let mut err = 0.0;
    let mut nodes = 0;
    let mut converged = true;
    let mut fact = 1.0;
    for n in 0..=n_max {
        if n > 0 {
            fact *= n as f64;
        }
        let mu = moment(t, n, tol)?;
        let d = phi.eval(0.0, n)?;
        let scale = fact * lambda.powi(n as i32 + 1);
        value += mu.value * d / scale;
        err += mu.error_estimate * d.abs() / scale;
        nodes += mu.nodes_used;
        converged &= mu.converged;
    }
    Ok(PairingResult { value, error_estimate: err, nodes_used: nodes, converged })
}

/// Delta-comb expansion `sum_{m<=m_max} mu_{2m}(eps)/(2m)! phi^(2m)(0)` of
/// `<Im coth(. + i eps), phi>` for slowly varying probes.
pub fn delta_series_pairing(phi: &dyn Probe, eps: f64, m_max: u32) -> Result<f64, MomentError> {
    if m_max > MAX_COMB_ORDER {
        return Err(MomentError::InvalidParameter {
            what: "delta-comb expansion is offered through m = 3 only",
        });
    }
    if !(eps > 0.0 && eps < PI / 2.0) {
        return Err(MomentError::InvalidParameter { what: "delta-comb needs 0 < eps < pi/2" });
    }
    let mut sum = 0.0;
    let mut fact = 1.0; // (2m)!
    for m in 0..=m_max {
        if m > 0 {
            fact *= (2 * m - 1) as f64 * (2 * m) as f64;
        }
        sum += moment_formula(m, eps / PI)? / fact * phi.eval(0.0, 2 * m)?;
    }
    Ok(sum)
}

/// One row of the numeric-vs-closed-form moment comparison.
#[derive(Debug, Clone)]
pub struct MomentRow {
    pub n: u32,
    pub eps: f64,
    pub numeric: f64,
    pub closed_form: f64,
    pub abs_err: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

/// Moment table for the nascent comb `Im coth(. + i eps)`: every `n` up to
/// `n_max` at every requested `eps`, numeric ladder value against the
/// Bernoulli closed form (odd moments close to `0` by parity).
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub rows: Vec<MomentRow>,
}

impl MomentTable {
    pub fn build(eps_list: &[f64], n_max: u32, tol: f64) -> Result<MomentTable, MomentError> {
        let jobs: Vec<(f64, u32)> = eps_list
            .iter()
            .flat_map(|&e| (0..=n_max).map(move |n| (e, n)))
            .collect();
        let rows: Result<Vec<MomentRow>, MomentError> = jobs
            .par_iter()
            .map(|&(eps, n)| {
                if !(eps > 0.0 && eps < PI / 2.0) {
                    return Err(MomentError::InvalidParameter {
                        what: "moment table needs 0 < eps < pi/2",
                    });
                }
                let numeric = moment(&KernelSpec::coth_eps_imag(eps), n, tol)?;
                let closed = if n % 2 == 0 { moment_formula(n / 2, eps / PI)? } else { 0.0 };
                Ok(MomentRow {
                    n,
                    eps,
                    numeric: numeric.value,
                    closed_form: closed,
                    abs_err: (numeric.value - closed).abs(),
                    error_estimate: numeric.error_estimate,
                    converged: numeric.converged,
                })
            })
            .collect();
        Ok(MomentTable { rows: rows? })
    }

    /// Fold the table into a reportable outcome: residual is the worst
    /// absolute deviation from the closed forms.
    pub fn outcome(&self, name: &'static str, tol: f64) -> CheckOutcome {
        let details: Vec<DetailRow> = self
            .rows
            .iter()
            .map(|r| {
                DetailRow::new(
                    format!("n={},eps={}", r.n, r.eps),
                    vec![
                        ("numeric", r.numeric),
                        ("closed_form", r.closed_form),
                        ("abs_err", r.abs_err),
                        ("error_estimate", r.error_estimate),
                    ],
                )
            })
            .collect();
        let residual = self.rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
        let all_converged = self.rows.iter().all(|r| r.converged);
        let digest = {
            let parts: Vec<String> = self
                .rows
                .iter()
                .map(|r| format!("{}:{}", r.n, fmt_f64(r.eps)))
                .collect();
            fnv1a_hex(&format!("check={name};rows=[{}];tol={}", parts.join(","), fmt_f64(tol)))
        };
        CheckOutcome::from_residual(name, residual, tol, all_converged, digest, details)
    }
}
