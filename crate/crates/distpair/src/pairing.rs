//! The pairing engine: `<T, phi>` for singular kernels under explicit
//! regularizations.
//!
//! Every kernel/regularization pair is reduced to integrals of *smooth*
//! functions before any quadrature runs:
//!
//! * **Principal value** (`1/y`, `coth`):
//!   `<P(1/y), phi> = int_0^Y (phi(y) - phi(-y))/y dy`, with the panel
//!   `[0, y0]` replaced by the exact odd-Taylor head
//!   `sum_k 2 phi^(2k+1)(0) y0^(2k+1) / ((2k+1)! (2k+1))` so the quotient is
//!   never evaluated where cancellation could bite.  `coth` adds the bounded
//!   odd part `langevin(y)` integrated directly.
//! * **Hadamard finite part** (`1/y^2`, standardized `csch^2`):
//!   `<FP(1/y^2), phi> = int_0^Y (phi(y) + phi(-y) - 2 phi(0))/y^2 dy
//!   - 2 phi(0)/Y`, again with an even-Taylor head on `[0, y0]`; the closed
//!   tail term is what keeps the finite part honest when the integration is
//!   truncated at the probe's support edge.  The standardized `csch^2` is
//!   the smooth difference `csch^2 - 1/y^2` plus exactly that finite part —
//!   with *no* delta term: the machine checks in this crate exist largely to
//!   confirm that `d/dy coth = -csch^2` in this standardized sense, with the
//!   classical `2 delta` appearing only in the sign-part decomposition.
//! * **eps-shift limit**: pair at a strictly decreasing ladder of shifts and
//!   extrapolate to `eps = 0` by Neville's scheme *in powers of eps* (both
//!   shifted components have full polynomial expansions in `eps`, odd and
//!   even terms alike, so a power-2 scheme stalls at `O(eps)` accuracy).
//!
//! Convergence is contractual: `PairingResult::converged` means the summed
//! error estimate met the requested absolute tolerance.  A result that blew
//! its budget is returned with `converged = false` and is treated downstream
//! as indeterminate, never as a value.

use std::fmt;

use rayon::prelude::*;

use crate::outcome::{fnv1a_hex, CheckOutcome, DetailRow};
use crate::probes::{DerivProbe, Probe, ProbeError, TestFunction};
use crate::quad;
use crate::report::fmt_f64;
use crate::special::{self, SeriesTruncation, SpecialError};

/// Default absolute tolerance for plain, principal-value and finite-part
/// pairings.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default absolute tolerance after an eps-shift extrapolation.
pub const DEFAULT_TOL_EPS: f64 = 1e-6;

/// Where the analytic Taylor head takes over from quadrature.
const HEAD_CUT: f64 = 0.02;
/// Interval budget per quadrature call (15 evaluations each).
const MAX_INTERVALS: usize = 20_000;

/// Kernels `T` the engine knows how to pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `coth y`, singular part `1/y`.
    Coth,
    /// Standardized `csch^2 y` (finite-part reading of the `1/y^2` core).
    Csch2,
    /// Bare `1/y`.
    InvY,
    /// Bare `1/y^2`.
    InvY2,
    /// `coth y - 1/y`: bounded, needs no regularization.
    Langevin,
    /// `Re coth(y + i eps)`.
    CothEpsReal,
    /// `Im coth(y + i eps)`.
    CothEpsImag,
    /// Dirac delta at the origin.
    Delta,
}

impl KernelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::Coth => "coth",
            KernelKind::Csch2 => "csch2",
            KernelKind::InvY => "inv_y",
            KernelKind::InvY2 => "inv_y2",
            KernelKind::Langevin => "langevin",
            KernelKind::CothEpsReal => "coth_eps_real",
            KernelKind::CothEpsImag => "coth_eps_imag",
            KernelKind::Delta => "delta",
        }
    }
}

/// How the singular core is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularization {
    /// No regularization: the kernel must be locally integrable as written.
    None,
    PrincipalValue,
    FinitePart,
    /// Pair at an eps-ladder and extrapolate to `eps -> 0`.
    EpsLimit,
}

impl Regularization {
    pub fn as_str(self) -> &'static str {
        match self {
            Regularization::None => "none",
            Regularization::PrincipalValue => "principal_value",
            Regularization::FinitePart => "finite_part",
            Regularization::EpsLimit => "eps_limit",
        }
    }
}

/// A kernel together with its (mandatory, validated) regularization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub regularization: Regularization,
    /// Shift parameter; present exactly for the eps-shifted kernels with
    /// `Regularization::None`.
    pub eps: Option<f64>,
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.eps {
            Some(e) => write!(f, "{}[{}](eps={})", self.kind.as_str(), self.regularization.as_str(), e),
            None => write!(f, "{}[{}]", self.kind.as_str(), self.regularization.as_str()),
        }
    }
}

impl KernelSpec {
    pub fn coth() -> Self {
        KernelSpec { kind: KernelKind::Coth, regularization: Regularization::PrincipalValue, eps: None }
    }
    pub fn inv_y() -> Self {
        KernelSpec { kind: KernelKind::InvY, regularization: Regularization::PrincipalValue, eps: None }
    }
    pub fn csch2() -> Self {
        KernelSpec { kind: KernelKind::Csch2, regularization: Regularization::FinitePart, eps: None }
    }
    pub fn inv_y2() -> Self {
        KernelSpec { kind: KernelKind::InvY2, regularization: Regularization::FinitePart, eps: None }
    }
    pub fn langevin() -> Self {
        KernelSpec { kind: KernelKind::Langevin, regularization: Regularization::None, eps: None }
    }
    pub fn delta() -> Self {
        KernelSpec { kind: KernelKind::Delta, regularization: Regularization::None, eps: None }
    }
    pub fn coth_eps_real(eps: f64) -> Self {
        KernelSpec { kind: KernelKind::CothEpsReal, regularization: Regularization::None, eps: Some(eps) }
    }
    pub fn coth_eps_imag(eps: f64) -> Self {
        KernelSpec { kind: KernelKind::CothEpsImag, regularization: Regularization::None, eps: Some(eps) }
    }
    pub fn coth_eps_real_limit() -> Self {
        KernelSpec { kind: KernelKind::CothEpsReal, regularization: Regularization::EpsLimit, eps: None }
    }
    pub fn coth_eps_imag_limit() -> Self {
        KernelSpec { kind: KernelKind::CothEpsImag, regularization: Regularization::EpsLimit, eps: None }
    }

    /// Enforce the kernel/regularization contract.
    ///
    /// The singular kernels do not exist as distributions without their
    /// regularization, so a mismatch is a *type* error, not a numerical one:
    /// `coth`/`1/y` demand the principal value, `csch^2`/`1/y^2` demand the
    /// finite part, the bounded kernels demand none, and the eps-shifted
    /// kernels take either a fixed positive shift or the ladder limit.
    pub fn validate(&self) -> Result<(), PairingError> {
        use KernelKind::*;
        use Regularization::*;
        let ok = match self.kind {
            Coth | InvY => self.regularization == PrincipalValue,
            Csch2 | InvY2 => self.regularization == FinitePart,
            Langevin | Delta => self.regularization == None,
            CothEpsReal | CothEpsImag => {
                self.regularization == None || self.regularization == EpsLimit
            }
        };
        if !ok {
            return Err(PairingError::InvalidRegularization {
                kind: self.kind,
                regularization: self.regularization,
            });
        }
        match self.kind {
            CothEpsReal | CothEpsImag => match self.regularization {
                None => match self.eps {
                    Some(e) if e > 0.0 && e.is_finite() => Ok(()),
                    _ => Err(PairingError::MissingEps(self.kind)),
                },
                _ => {
                    if self.eps.is_some() {
                        Err(PairingError::UnexpectedEps(self.kind))
                    } else {
                        Ok(())
                    }
                }
            },
            _ => {
                if self.eps.is_some() {
                    Err(PairingError::UnexpectedEps(self.kind))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Canonical string for input digests.
    pub fn digest_string(&self) -> String {
        match self.eps {
            Some(e) => format!("{}:{}:{}", self.kind.as_str(), self.regularization.as_str(), fmt_f64(e)),
            None => format!("{}:{}", self.kind.as_str(), self.regularization.as_str()),
        }
    }
}

/// Value, honest error, and cost of one pairing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingResult {
    pub value: f64,
    pub error_estimate: f64,
    pub nodes_used: u64,
    /// `error_estimate <= requested tolerance`.  A non-converged result is a
    /// budget report, not a value.
    pub converged: bool,
}

/// A strictly decreasing ladder of eps values plus the polynomial order used
/// to extrapolate to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderSpec {
    pub values: Vec<f64>,
    pub extrapolation_order: usize,
}

impl LadderSpec {
    pub fn new(values: Vec<f64>, extrapolation_order: usize) -> Result<Self, PairingError> {
        if values.len() < 2 {
            return Err(PairingError::LadderInvalid("ladder needs at least two rungs"));
        }
        if extrapolation_order < 1 {
            return Err(PairingError::LadderInvalid("extrapolation order must be >= 1"));
        }
        if extrapolation_order + 1 > values.len() {
            return Err(PairingError::LadderInvalid(
                "extrapolation order needs at least order+1 rungs",
            ));
        }
        let mut prev = f64::INFINITY;
        for &v in &values {
            if !(v > 0.0 && v.is_finite() && v < prev) {
                return Err(PairingError::LadderInvalid(
                    "ladder values must be finite, positive, strictly decreasing",
                ));
            }
            prev = v;
        }
        Ok(LadderSpec { values, extrapolation_order })
    }

    /// The default six-rung geometric ladder `0.2 * 2^{-i}` with full-order
    /// extrapolation.  Six rungs take the extrapolated residual to ~1e-10;
    /// four rungs of the same ladder only reach ~3e-5.
    pub fn default_eps() -> Self {
        LadderSpec {
            values: vec![0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625],
            extrapolation_order: 5,
        }
    }

    /// Geometric ladder with `n` rungs starting at `top`, halving each rung.
    pub fn geometric(top: f64, n: usize) -> Result<Self, PairingError> {
        if !(top > 0.0 && top.is_finite()) {
            return Err(PairingError::LadderInvalid("ladder top must be positive and finite"));
        }
        let values: Vec<f64> = (0..n).map(|i| top / (1u64 << i) as f64).collect();
        LadderSpec::new(values, n.saturating_sub(1).max(1))
    }

    pub fn digest_string(&self) -> String {
        let vals: Vec<String> = self.values.iter().map(|v| fmt_f64(*v)).collect();
        format!("[{}]:p{}", vals.join(","), self.extrapolation_order)
    }
}

/// Engine errors.
#[derive(Debug, Clone, PartialEq)]
pub enum PairingError {
    InvalidRegularization { kind: KernelKind, regularization: Regularization },
    MissingEps(KernelKind),
    UnexpectedEps(KernelKind),
    InsufficientProbeOrder { needed: u32, available: u32 },
    LadderInvalid(&'static str),
    LadderMismatch { rungs: usize, ladder: usize },
    NotConverged { what: String },
    Probe(ProbeError),
    Special(SpecialError),
}

impl fmt::Display for PairingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairingError::InvalidRegularization { kind, regularization } => write!(
                f,
                "kernel '{}' cannot be paired under regularization '{}'",
                kind.as_str(),
                regularization.as_str()
            ),
            PairingError::MissingEps(k) => {
                write!(f, "kernel '{}' needs a finite eps > 0", k.as_str())
            }
            PairingError::UnexpectedEps(k) => {
                write!(f, "kernel '{}' does not take an eps parameter here", k.as_str())
            }
            PairingError::InsufficientProbeOrder { needed, available } => write!(
                f,
                "pairing needs probe derivatives up to order {needed}, probe offers {available}"
            ),
            PairingError::LadderInvalid(msg) => write!(f, "invalid ladder: {msg}"),
            PairingError::LadderMismatch { rungs, ladder } => {
                write!(f, "{rungs} rung results supplied for a ladder of {ladder} values")
            }
            PairingError::NotConverged { what } => {
                write!(f, "{what} did not converge within its budget")
            }
            PairingError::Probe(e) => write!(f, "probe error: {e}"),
            PairingError::Special(e) => write!(f, "kernel error: {e}"),
        }
    }
}

impl std::error::Error for PairingError {}

impl From<ProbeError> for PairingError {
    fn from(e: ProbeError) -> Self {
        PairingError::Probe(e)
    }
}
impl From<SpecialError> for PairingError {
    fn from(e: SpecialError) -> Self {
        PairingError::Special(e)
    }
}

/// Outer truncation radius and head cut for a probe.
fn radii(phi: &dyn Probe) -> (f64, f64) {
    let (lo, hi) = phi.support();
    let big = lo.abs().max(hi.abs()).max(4.0 * HEAD_CUT);
    (HEAD_CUT.min(big / 2.0), big)
}

/// Breakpoints for a folded integral on `[y0, big]`, log-spaced so the
/// adaptive refinement starts near the scales where singular kernels vary.
fn folded_pts(y0: f64, big: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![y0];
    for m in [0.1, 0.5, 2.0, 8.0, 32.0] {
        if m > y0 && m < big {
            pts.push(m);
        }
    }
    for &e in extra {
        if e > y0 && e < big {
            pts.push(e);
        }
    }
    pts.push(big);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn eval0(phi: &dyn Probe, y: f64) -> f64 {
    phi.eval(y, 0).expect("order 0 cannot exceed the probe cap")
}

/// Odd Taylor head of the principal value on `[0, y0]`:
/// `sum_{k=0..3} 2 phi^(2k+1)(0) y0^(2k+1) / ((2k+1)! (2k+1))`.
/// Returns `(head, head_error)`.
fn pv_head(phi: &dyn Probe, y0: f64) -> Result<(f64, f64), PairingError> {
    if phi.max_order() < 7 {
        return Err(PairingError::InsufficientProbeOrder { needed: 7, available: phi.max_order() });
    }
    let mut head = 0.0;
    let mut last = 0.0;
    for k in 0..=3u32 {
        let order = 2 * k + 1;
        let d = phi.eval(0.0, order)?;
        let fact = (1..=order).map(|i| i as f64).product::<f64>();
        last = 2.0 * d * y0.powi(order as i32) / (fact * order as f64);
        head += last;
    }
    Ok((head, last.abs()))
}

/// Even Taylor head of the finite part on `[0, y0]`:
/// `sum_{k=1..} 2 phi^(2k)(0) y0^(2k-1) / ((2k)! (2k-1))`, through order 8
/// when the probe allows it, order 6 otherwise.
fn fp_head(phi: &dyn Probe, y0: f64) -> Result<(f64, f64), PairingError> {
    if phi.max_order() < 6 {
        return Err(PairingError::InsufficientProbeOrder { needed: 6, available: phi.max_order() });
    }
    let kmax = if phi.max_order() >= 8 { 4 } else { 3 };
    let mut head = 0.0;
    let mut last = 0.0;
    for k in 1..=kmax {
        let order = 2 * k;
        let d = phi.eval(0.0, order)?;
        let fact = (1..=order).map(|i| i as f64).product::<f64>();
        last = 2.0 * d * y0.powi(order as i32 - 1) / (fact * (order - 1) as f64);
        head += last;
    }
    Ok((head, last.abs()))
}

fn assemble(value: f64, error: f64, nodes: u64, tol: f64) -> PairingResult {
    PairingResult { value, error_estimate: error, nodes_used: nodes, converged: value.is_finite() && error <= tol }
}

/// `<P(1/y), phi>`.
fn pair_pv_inv_y(phi: &dyn Probe, tol: f64) -> Result<PairingResult, PairingError> {
    let (y0, big) = radii(phi);
    let (head, head_err) = pv_head(phi, y0)?;
    let mut f = |y: f64| (eval0(phi, y) - eval0(phi, -y)) / y;
    let q = quad::integrate(&mut f, &folded_pts(y0, big, &[]), 0.5 * tol, MAX_INTERVALS);
    Ok(assemble(head + q.value, head_err + q.error, q.nodes, tol))
}

/// `<FP(1/y^2), phi>`, including the exact `-2 phi(0)/Y` tail beyond the
/// probe's numerical support.
fn pair_fp_inv_y2(phi: &dyn Probe, tol: f64) -> Result<PairingResult, PairingError> {
    let (y0, big) = radii(phi);
    let (head, head_err) = fp_head(phi, y0)?;
    let phi0 = eval0(phi, 0.0);
    let mut f = |y: f64| (eval0(phi, y) + eval0(phi, -y) - 2.0 * phi0) / (y * y);
    let q = quad::integrate(&mut f, &folded_pts(y0, big, &[]), 0.5 * tol, MAX_INTERVALS);
    let tail = -2.0 * phi0 / big;
    Ok(assemble(head + q.value + tail, head_err + q.error, q.nodes, tol))
}

/// `<coth, phi>` under the principal value: the `P(1/y)` part plus the
/// bounded odd `langevin` part, folded to `[0, Y]`.
fn pair_pv_coth(phi: &dyn Probe, tol: f64) -> Result<PairingResult, PairingError> {
    let pv = pair_pv_inv_y(phi, 0.5 * tol)?;
    let (_, big) = radii(phi);
    let mut f = |y: f64| special::langevin(y) * (eval0(phi, y) - eval0(phi, -y));
    let q = quad::integrate(&mut f, &folded_pts(0.0, big, &[]), 0.25 * tol, MAX_INTERVALS);
    Ok(assemble(pv.value + q.value, pv.error_estimate + q.error, pv.nodes_used + q.nodes, tol))
}

/// `<langevin, phi>` (bounded, folded odd).
fn pair_langevin(phi: &dyn Probe, tol: f64) -> Result<PairingResult, PairingError> {
    let (_, big) = radii(phi);
    let mut f = |y: f64| special::langevin(y) * (eval0(phi, y) - eval0(phi, -y));
    let q = quad::integrate(&mut f, &folded_pts(0.0, big, &[]), 0.5 * tol, MAX_INTERVALS);
    Ok(assemble(q.value, q.error, q.nodes, tol))
}

/// `<(csch^2)_st, phi>`: smooth difference plus finite part.
fn pair_csch2(phi: &dyn Probe, tol: f64) -> Result<PairingResult, PairingError> {
    let fp = pair_fp_inv_y2(phi, 0.5 * tol)?;
    let (_, big) = radii(phi);
    let mut f = |y: f64| special::csch2_minus_inv_y2(y) * (eval0(phi, y) + eval0(phi, -y));
    let q = quad::integrate(&mut f, &folded_pts(0.0, big, &[]), 0.25 * tol, MAX_INTERVALS);
    Ok(assemble(fp.value + q.value, fp.error_estimate + q.error, fp.nodes_used + q.nodes, tol))
}

/// `<Re coth(. + i eps), phi>` at fixed `eps` (odd kernel, folded).
fn pair_eps_real(phi: &dyn Probe, eps: f64, tol: f64) -> Result<PairingResult, PairingError> {
    let (_, big) = radii(phi);
    let mut f = |y: f64| {
        special::coth_eps_real(y, eps).expect("eps validated positive")
            * (eval0(phi, y) - eval0(phi, -y))
    };
    let pts = folded_pts(0.0, big, &[0.5 * eps, 2.0 * eps, 8.0 * eps]);
    let q = quad::integrate(&mut f, &pts, 0.5 * tol, MAX_INTERVALS);
    Ok(assemble(q.value, q.error, q.nodes, tol))
}

/// `<Im coth(. + i eps), phi>` at fixed `eps` (even kernel, folded).
fn pair_eps_imag(phi: &dyn Probe, eps: f64, tol: f64) -> Result<PairingResult, PairingError> {
    let (_, big) = radii(phi);
    let mut f = |y: f64| {
        special::coth_eps_imag(y, eps).expect("eps validated positive")
            * (eval0(phi, y) + eval0(phi, -y))
    };
    let pts = folded_pts(0.0, big, &[0.5 * eps, 2.0 * eps, 8.0 * eps]);
    let q = quad::integrate(&mut f, &pts, 0.5 * tol, MAX_INTERVALS);
    Ok(assemble(q.value, q.error, q.nodes, tol))
}

/// Nascent principal value `<y/(y^2 + eps^2), phi>` (odd kernel, folded).
/// Converges to `<P(1/y), phi>` as `eps -> 0`; used by the decomposition
/// check as the stated regularized reading of the `1/y` part.
pub fn pair_nascent_inv_y(phi: &dyn Probe, eps: f64, tol: f64) -> Result<PairingResult, PairingError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(PairingError::MissingEps(KernelKind::InvY));
    }
    let (_, big) = radii(phi);
    let mut f = |y: f64| y / (y * y + eps * eps) * (eval0(phi, y) - eval0(phi, -y));
    let pts = folded_pts(0.0, big, &[0.5 * eps, 2.0 * eps, 8.0 * eps]);
    let q = quad::integrate(&mut f, &pts, 0.5 * tol, MAX_INTERVALS);
    Ok(assemble(q.value, q.error, q.nodes, tol))
}

/// Pair kernel `t` against probe `phi` to absolute tolerance `tol`.
pub fn pair(t: &KernelSpec, phi: &dyn Probe, tol: f64) -> Result<PairingResult, PairingError> {
    t.validate()?;
    match (t.kind, t.regularization) {
        (KernelKind::Delta, _) => {
            let v = phi.eval(0.0, 0)?;
            Ok(PairingResult { value: v, error_estimate: 0.0, nodes_used: 0, converged: true })
        }
        (KernelKind::InvY, _) => pair_pv_inv_y(phi, tol),
        (KernelKind::InvY2, _) => pair_fp_inv_y2(phi, tol),
        (KernelKind::Coth, _) => pair_pv_coth(phi, tol),
        (KernelKind::Langevin, _) => pair_langevin(phi, tol),
        (KernelKind::Csch2, _) => pair_csch2(phi, tol),
        (KernelKind::CothEpsReal, Regularization::None) => {
            pair_eps_real(phi, t.eps.expect("validated"), tol)
        }
        (KernelKind::CothEpsImag, Regularization::None) => {
            pair_eps_imag(phi, t.eps.expect("validated"), tol)
        }
        (KernelKind::CothEpsReal, _) | (KernelKind::CothEpsImag, _) => {
            pair_with_ladder(t.kind, phi, &LadderSpec::default_eps(), tol)
        }
    }
}

/// Pair an eps-shifted kernel along `ladder` and extrapolate to `eps = 0`.
pub fn pair_with_ladder(
    kind: KernelKind,
    phi: &dyn Probe,
    ladder: &LadderSpec,
    tol: f64,
) -> Result<PairingResult, PairingError> {
    let rung_tol = (tol * 1e-3).max(1e-13);
    let mut rungs = Vec::with_capacity(ladder.values.len());
    for &eps in &ladder.values {
        let r = match kind {
            KernelKind::CothEpsReal => pair_eps_real(phi, eps, rung_tol)?,
            KernelKind::CothEpsImag => pair_eps_imag(phi, eps, rung_tol)?,
            KernelKind::InvY => pair_nascent_inv_y(phi, eps, rung_tol)?,
            other => {
                return Err(PairingError::InvalidRegularization {
                    kind: other,
                    regularization: Regularization::EpsLimit,
                })
            }
        };
        rungs.push(r);
    }
    let ex = extrapolate_limit(&rungs, ladder)?;
    Ok(PairingResult { converged: ex.error_estimate <= tol && ex.converged, ..ex })
}

/// Neville extrapolation of ladder results to `eps = 0`, first power of eps.
///
/// The returned `error_estimate` is the last tableau correction plus the
/// rung errors amplified by the exact extrapolation weights
/// `l_i(0) = prod_{j != i} x_j/(x_j - x_i)`; `converged` reports whether all
/// rungs converged (the caller owns the tolerance comparison).
pub fn extrapolate_limit(rungs: &[PairingResult], ladder: &LadderSpec) -> Result<PairingResult, PairingError> {
    let n = ladder.values.len();
    if rungs.len() != n {
        return Err(PairingError::LadderMismatch { rungs: rungs.len(), ladder: n });
    }
    let p = ladder.extrapolation_order;
    if let Some(bad) = rungs.iter().position(|r| !r.converged) {
        return Err(PairingError::NotConverged {
            what: format!("ladder rung {} (eps = {})", bad, ladder.values[bad]),
        });
    }
    let x = &ladder.values;
    // Neville tableau evaluated at 0, column by column.
    let mut cur: Vec<f64> = rungs.iter().map(|r| r.value).collect();
    let mut prev_last = cur[n - 1];
    for j in 1..=p {
        let mut next = vec![0.0; n];
        for i in j..n {
            next[i] = (x[i] * cur[i - 1] - x[i - j] * cur[i]) / (x[i] - x[i - j]);
        }
        if j == p {
            prev_last = cur[n - 1];
        }
        cur = next;
    }
    let value = cur[n - 1];
    let extrap_err = (value - prev_last).abs();

    // Amplification of rung errors over the points the final entry used.
    let lo = n - 1 - p;
    let mut prop_err = 0.0;
    for i in lo..n {
        let mut weight = 1.0;
        for j in lo..n {
            if j != i {
                weight *= x[j] / (x[j] - x[i]);
            }
        }
        prop_err += weight.abs() * rungs[i].error_estimate;
    }
    let nodes = rungs.iter().map(|r| r.nodes_used).sum();
    Ok(PairingResult {
        value,
        error_estimate: extrap_err + prop_err,
        nodes_used: nodes,
        converged: true,
    })
}

/// `<T', phi> = -<T, phi'>`.
pub fn weak_derivative_pair(t: &KernelSpec, phi: &dyn Probe, tol: f64) -> Result<PairingResult, PairingError> {
    let d = DerivProbe { inner: phi, shift: 1 };
    let r = pair(t, &d, tol)?;
    Ok(PairingResult { value: -r.value, ..r })
}

/// Machine check of the derivative identity: for every probe,
/// `Delta(phi) = <coth', phi>_weak + <(csch^2)_st, phi>` must vanish.
///
/// The row also carries the *sign-convention residual*
/// `Delta - 2 phi(0)`: if the derivative identity needed an extra
/// `2 delta(y)` term, `Delta` would sit at `2 phi(0)` instead of `0`, so
/// this residual lands at `-2 phi(0)` precisely because no such term exists.
pub fn check_derivative_identity(
    battery: &[TestFunction],
    tol: f64,
) -> Result<CheckOutcome, PairingError> {
    let pair_tol = (tol * 1e-2).clamp(1e-12, 1e-8);
    let rows: Result<Vec<_>, PairingError> = battery
        .par_iter()
        .map(|phi| {
            let w = weak_derivative_pair(&KernelSpec::coth(), phi, pair_tol)?;
            let c = pair(&KernelSpec::csch2(), phi, pair_tol)?;
            let phi0 = phi.eval(0.0, 0)?;
            let delta = w.value + c.value;
            Ok((
                DetailRow::new(
                    phi.label(),
                    vec![
                        ("weak_coth_derivative", w.value),
                        ("csch2_pairing", c.value),
                        ("delta", delta),
                        ("sign_residual", delta - 2.0 * phi0),
                        ("error_estimate", w.error_estimate + c.error_estimate),
                    ],
                ),
                delta.abs(),
                w.converged && c.converged,
            ))
        })
        .collect();
    let rows = rows?;

    let residual = rows.iter().map(|(_, d, _)| *d).fold(0.0, f64::max);
    let all_converged = rows.iter().all(|(_, _, c)| *c);
    let digest = {
        let probes: Vec<String> = battery.iter().map(|p| p.label()).collect();
        fnv1a_hex(&format!(
            "check=derivative_identity;probes=[{}];tol={}",
            probes.join(","),
            fmt_f64(tol)
        ))
    };
    Ok(CheckOutcome::from_residual(
        "derivative_identity",
        residual,
        tol,
        all_converged,
        digest,
        rows.into_iter().map(|(r, _, _)| r).collect(),
    ))
}

/// Machine check of the eps-shift decomposition: the extrapolated limit of
/// `<coth(. + i eps), phi>` must equal the partial-fraction reading
/// `<P(1/y), phi> + <L_K + tail, phi> - i pi phi(0)`, where the `P(1/y)`
/// term is itself realized as the `eps -> 0` limit of the nascent kernel
/// `y/(y^2 + eps^2)`.
pub fn coth_eps_decomposition_check(
    phi: &TestFunction,
    trunc: SeriesTruncation,
    eps_top: f64,
    tol: f64,
) -> Result<CheckOutcome, PairingError> {
    let ladder = LadderSpec::geometric(eps_top, 6)?;
    let rung_tol = (tol * 1e-3).max(1e-13);

    // Left side: both components of the shifted kernel, extrapolated.
    let lhs_re = pair_with_ladder(KernelKind::CothEpsReal, phi, &ladder, tol)?;
    let lhs_im = pair_with_ladder(KernelKind::CothEpsImag, phi, &ladder, tol)?;

    // Right side, real: nascent-PV limit plus the bounded partial-fraction
    // sum with its tail estimate, in one folded quadrature.
    let rhs_pv = pair_with_ladder(KernelKind::InvY, phi, &ladder, tol)?;
    let (_, big) = radii(phi);
    let k = trunc.k;
    let tail_on = trunc.tail_correction;
    let mut f = |y: f64| {
        let mut l = 0.0;
        let y2 = y * y;
        let mut i = k;
        while i >= 1 {
            let kp = i as f64 * std::f64::consts::PI;
            l += 2.0 * y / (y2 + kp * kp);
            i -= 1;
        }
        if tail_on {
            l += special::coth_series_tail_midpoint(y, k);
        }
        l * (eval0(phi, y) - eval0(phi, -y))
    };
    let series_part = quad::integrate(&mut f, &folded_pts(0.0, big, &[]), rung_tol, MAX_INTERVALS);

    let rhs_re = rhs_pv.value + series_part.value;
    let phi0 = phi.eval(0.0, 0)?;
    let rhs_im = -std::f64::consts::PI * phi0;

    // Cross-route: the nascent-PV limit against the direct PV pairing.
    let direct_pv = pair_pv_inv_y(phi, rung_tol)?;

    let diff_re = lhs_re.value - rhs_re;
    let diff_im = lhs_im.value - rhs_im;
    let diff_pv = rhs_pv.value - direct_pv.value;

    let rows = vec![
        DetailRow::new(
            format!("real[{}]", phi.label()),
            vec![("lhs", lhs_re.value), ("rhs", rhs_re), ("diff", diff_re)],
        ),
        DetailRow::new(
            format!("imag[{}]", phi.label()),
            vec![("lhs", lhs_im.value), ("rhs", rhs_im), ("diff", diff_im)],
        ),
        DetailRow::new(
            format!("pv_route[{}]", phi.label()),
            vec![("lhs", rhs_pv.value), ("rhs", direct_pv.value), ("diff", diff_pv)],
        ),
    ];
    let residual = diff_re.abs().max(diff_im.abs()).max(diff_pv.abs());
    let all_converged = lhs_re.converged
        && lhs_im.converged
        && rhs_pv.converged
        && series_part.converged
        && direct_pv.converged;
    let digest = fnv1a_hex(&format!(
        "check=eps_decomposition;probe={};K={};tail={};eps_top={};tol={}",
        phi.label(),
        trunc.k,
        trunc.tail_correction,
        fmt_f64(eps_top),
        fmt_f64(tol)
    ));
    Ok(CheckOutcome::from_residual(
        "eps_decomposition",
        residual,
        tol,
        all_converged,
        digest,
        rows,
    ))
}
