//! Smooth test functions (probes) and their exact derivatives.
//!
//! A pairing `<T, phi>` is only as trustworthy as the probe derivatives that
//! feed the principal-value and finite-part Taylor heads, so every family
//! here has *closed-form* derivatives up to order 8 — no finite differences
//! anywhere:
//!
//! * **Gaussian / Hermite–Gaussian**: `phi(y) = H_m(u) e^{-u^2}` with
//!   `u = (y - c)/w`.  Differentiation lowers to the Hermite three-term
//!   recurrence through `d/du [H_m e^{-u^2}] = -H_{m+1} e^{-u^2}`, so
//!   `phi^(n)(y) = (-1/w)^n H_{m+n}(u) e^{-u^2}`.
//! * **Bump**: `phi(y) = exp(-1/(1 - u^2))` on `|u| < 1`, identically zero
//!   outside.  Derivatives take the form `P_n(u)/(1-u^2)^{2n} phi(y)/w^n`
//!   where the integer-coefficient polynomials obey
//!   `P_{n+1} = P_n' (1-u^2)^2 + (4n u (1-u^2) - 2u) P_n`, `P_0 = 1`.
//!
//! Gaussian-family probes also carry their exact cosine transform
//! `int phi(y) cos(w y) dy = w sqrt(pi) (w omega)^m e^{-(w omega)^2/4}
//! cos(omega c + m pi/2)`, which the noise module pairs against spectral
//! kernels; the bump family has no closed transform and is handled
//! numerically or excluded there.
//!
//! The [`Probe`] trait is the internal currency of the pairing engine: it
//! lets derivative probes (`phi'`), dilated probes (`phi(./lambda)`), and
//! linear combinations flow through the same quadrature paths as the
//! concrete families.

use std::fmt;
use std::sync::OnceLock;

/// Highest derivative order any probe guarantees.
pub const MAX_DERIV_ORDER: u32 = 8;

/// Errors from probe construction or evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeError {
    NonPositiveWidth,
    NonFiniteParameter,
    DerivativeOrderTooLarge { requested: u32, max: u32 },
}

impl fmt::Display for ProbeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeError::NonPositiveWidth => write!(f, "probe width must be finite and > 0"),
            ProbeError::NonFiniteParameter => write!(f, "probe parameters must be finite"),
            ProbeError::DerivativeOrderTooLarge { requested, max } => {
                write!(f, "derivative order {requested} exceeds the supported maximum {max}")
            }
        }
    }
}

impl std::error::Error for ProbeError {}

/// Probe family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Gaussian,
    /// `H_m(u) e^{-u^2}` with the physicists' Hermite polynomial of this order.
    HermiteGaussian { order: u32 },
    /// Compactly supported `exp(-1/(1-u^2))` on `|u| < 1`.
    Bump,
}

/// A concrete smooth test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub family: Family,
    pub center: f64,
    pub width: f64,
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Gaussian => write!(f, "gaussian(c={},w={})", self.center, self.width),
            Family::HermiteGaussian { order } => {
                write!(f, "hermite{}(c={},w={})", order, self.center, self.width)
            }
            Family::Bump => write!(f, "bump(c={},w={})", self.center, self.width),
        }
    }
}

fn check_params(center: f64, width: f64) -> Result<(), ProbeError> {
    if !center.is_finite() || !width.is_finite() {
        return Err(ProbeError::NonFiniteParameter);
    }
    if width <= 0.0 {
        return Err(ProbeError::NonPositiveWidth);
    }
    Ok(())
}

impl TestFunction {
    pub fn gaussian(center: f64, width: f64) -> Result<Self, ProbeError> {
        check_params(center, width)?;
        Ok(TestFunction { family: Family::Gaussian, center, width })
    }

    pub fn hermite(order: u32, center: f64, width: f64) -> Result<Self, ProbeError> {
        check_params(center, width)?;
        if order > MAX_DERIV_ORDER {
            return Err(ProbeError::DerivativeOrderTooLarge { requested: order, max: MAX_DERIV_ORDER });
        }
        Ok(TestFunction { family: Family::HermiteGaussian { order }, center, width })
    }

    pub fn bump(center: f64, width: f64) -> Result<Self, ProbeError> {
        check_params(center, width)?;
        Ok(TestFunction { family: Family::Bump, center, width })
    }

    /// `phi^(order)(y)`, exactly (closed form), for `order <= 8`.
    pub fn eval(&self, y: f64, order: u32) -> Result<f64, ProbeError> {
        if order > MAX_DERIV_ORDER {
            return Err(ProbeError::DerivativeOrderTooLarge { requested: order, max: MAX_DERIV_ORDER });
        }
        let u = (y - self.center) / self.width;
        let v = match self.family {
            Family::Gaussian => hermite_gaussian_deriv(0, u, order) * neg_inv_w_pow(self.width, order),
            Family::HermiteGaussian { order: m } => {
                hermite_gaussian_deriv(m, u, order) * neg_inv_w_pow(self.width, order)
            }
            Family::Bump => bump_deriv(u, order) / self.width.powi(order as i32),
        };
        Ok(v)
    }

    /// Interval outside which the probe (and all derivatives used here) is
    /// numerically zero: exact support for the bump, `|u| <= 8.5` for the
    /// Gaussian family (`e^{-72}` times polynomial growth is far below any
    /// tolerance in play).
    pub fn support(&self) -> (f64, f64) {
        let r = match self.family {
            Family::Bump => self.width,
            _ => 8.5 * self.width,
        };
        (self.center - r, self.center + r)
    }

    /// Closed-form cosine transform `int phi(y) cos(omega y) dy`, available
    /// for the Gaussian family only.
    pub fn cosine_transform(&self, omega: f64) -> Option<f64> {
        let m = match self.family {
            Family::Gaussian => 0u32,
            Family::HermiteGaussian { order } => order,
            Family::Bump => return None,
        };
        let w = self.width;
        let wo = w * omega;
        let amp = w * std::f64::consts::PI.sqrt() * wo.powi(m as i32) * (-wo * wo / 4.0).exp();
        let phase = omega * self.center + m as f64 * std::f64::consts::FRAC_PI_2;
        Some(amp * phase.cos())
    }

    /// Frequency beyond which the cosine transform is negligible
    /// (`< 1e-15` of its scale).  For the bump family this is the asymptotic
    /// `exp(-sqrt(2 w omega))` decay bound, not a closed form.
    pub fn transform_radius(&self) -> f64 {
        match self.family {
            Family::Bump => 700.0 / self.width,
            Family::Gaussian => 2.0 * 8.8 / self.width,
            Family::HermiteGaussian { .. } => 2.0 * 9.6 / self.width,
        }
    }
}

fn neg_inv_w_pow(w: f64, n: u32) -> f64 {
    (-1.0 / w).powi(n as i32)
}

/// `H_{m+n}(u) e^{-u^2}` via the Hermite three-term recurrence.
pub(crate) fn hermite_gaussian_deriv(m: u32, u: f64, n: u32) -> f64 {
    let gauss = (-u * u).exp();
    if gauss == 0.0 {
        return 0.0;
    }
    let target = m + n;
    let mut h_prev = 1.0; // H_0
    if target == 0 {
        return gauss;
    }
    let mut h = 2.0 * u; // H_1
    for k in 1..target {
        let h_next = 2.0 * u * h - 2.0 * k as f64 * h_prev;
        h_prev = h;
        h = h_next;
    }
    h * gauss
}

/// Coefficient tables for the bump-derivative polynomials `P_0 .. P_8`.
fn bump_poly_tables() -> &'static Vec<Vec<f64>> {
    static TABLES: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut tables: Vec<Vec<f64>> = vec![vec![1.0]]; // P_0 = 1
        for n in 0..MAX_DERIV_ORDER as usize {
            let p = &tables[n];
            // P' * (1 - u^2)^2 = P' * (1 - 2u^2 + u^4)
            let dp = poly_deriv(p);
            let a = poly_mul(&dp, &[1.0, 0.0, -2.0, 0.0, 1.0]);
            // (4n u (1 - u^2) - 2u) * P = ((4n - 2) u - 4n u^3) * P
            let lin = [0.0, 4.0 * n as f64 - 2.0, 0.0, -4.0 * n as f64];
            let b = poly_mul(p, &lin);
            tables.push(poly_add(&a, &b));
        }
        tables
    })
}

fn poly_deriv(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    (1..p.len()).map(|i| p[i] * i as f64).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0.0) + b.get(i).copied().unwrap_or(0.0))
        .collect()
}

fn poly_eval(p: &[f64], u: f64) -> f64 {
    let mut acc = 0.0;
    for &c in p.iter().rev() {
        acc = acc * u + c;
    }
    acc
}

/// `d^n/du^n exp(-1/(1-u^2))`, zero outside `|u| < 1`.
fn bump_deriv(u: f64, n: u32) -> f64 {
    if u.abs() >= 1.0 {
        return 0.0;
    }
    let q = 1.0 / (1.0 - u * u);
    // Past q = 700 the value is below 1e-250 even after the q^{2n} growth.
    if q >= 700.0 {
        return 0.0;
    }
    let base = (-q).exp();
    let p = &bump_poly_tables()[n as usize];
    poly_eval(p, u) * q.powi(2 * n as i32) * base
}

/// Polymorphic probe: what the pairing engine actually integrates against.
pub trait Probe {
    /// `phi^(order)(y)`; orders above [`max_order`](Probe::max_order) error.
    fn eval(&self, y: f64, order: u32) -> Result<f64, ProbeError>;
    /// Interval outside which the probe vanishes numerically.
    fn support(&self) -> (f64, f64);
    /// Largest derivative order this probe can deliver.
    fn max_order(&self) -> u32;
    /// Human-readable label for reports.
    fn label(&self) -> String;
}

impl Probe for TestFunction {
    fn eval(&self, y: f64, order: u32) -> Result<f64, ProbeError> {
        TestFunction::eval(self, y, order)
    }
    fn support(&self) -> (f64, f64) {
        TestFunction::support(self)
    }
    fn max_order(&self) -> u32 {
        MAX_DERIV_ORDER
    }
    fn label(&self) -> String {
        format!("{self}")
    }
}

/// `phi^(shift)` viewed as a probe in its own right.
pub struct DerivProbe<'a, P: Probe + ?Sized> {
    pub inner: &'a P,
    pub shift: u32,
}

impl<P: Probe + ?Sized> Probe for DerivProbe<'_, P> {
    fn eval(&self, y: f64, order: u32) -> Result<f64, ProbeError> {
        self.inner.eval(y, order + self.shift)
    }
    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }
    fn max_order(&self) -> u32 {
        self.inner.max_order().saturating_sub(self.shift)
    }
    fn label(&self) -> String {
        format!("d^{}[{}]", self.shift, self.inner.label())
    }
}

/// `phi(y / scale)`: the dilation that drives semiclassical limits.
pub struct ScaledProbe<'a, P: Probe + ?Sized> {
    pub inner: &'a P,
    pub scale: f64,
}

impl<P: Probe + ?Sized> Probe for ScaledProbe<'_, P> {
    fn eval(&self, y: f64, order: u32) -> Result<f64, ProbeError> {
        let v = self.inner.eval(y / self.scale, order)?;
        Ok(v / self.scale.powi(order as i32))
    }
    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.inner.support();
        (lo * self.scale, hi * self.scale)
    }
    fn max_order(&self) -> u32 {
        self.inner.max_order()
    }
    fn label(&self) -> String {
        format!("{}(y/{})", self.inner.label(), self.scale)
    }
}

/// `a phi1 + b phi2`, for linearity checks.
pub struct LinCombProbe<'a, P: Probe + ?Sized, Q: Probe + ?Sized> {
    pub a: f64,
    pub p: &'a P,
    pub b: f64,
    pub q: &'a Q,
}

impl<P: Probe + ?Sized, Q: Probe + ?Sized> Probe for LinCombProbe<'_, P, Q> {
    fn eval(&self, y: f64, order: u32) -> Result<f64, ProbeError> {
        Ok(self.a * self.p.eval(y, order)? + self.b * self.q.eval(y, order)?)
    }
    fn support(&self) -> (f64, f64) {
        let (alo, ahi) = self.p.support();
        let (blo, bhi) = self.q.support();
        (alo.min(blo), ahi.max(bhi))
    }
    fn max_order(&self) -> u32 {
        self.p.max_order().min(self.q.max_order())
    }
    fn label(&self) -> String {
        format!("{}*[{}] + {}*[{}]", self.a, self.p.label(), self.b, self.q.label())
    }
}

/// Seed for a deterministic probe battery.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySeed {
    /// `(center, width)` pairs for plain Gaussians.
    pub gaussians: Vec<(f64, f64)>,
    /// `(order, center, width)` triples for Hermite-Gaussians.
    pub hermites: Vec<(u32, f64, f64)>,
    /// `(center, width)` pairs for bumps.
    pub bumps: Vec<(f64, f64)>,
}

impl Default for FamilySeed {
    /// The standard nine-probe battery: shifted and scaled Gaussians covering
    /// origin-centered, off-center, far-off-center and wide/narrow cases, an
    /// odd probe (`H_1`, which must annihilate even kernels), an even probe
    /// with `phi(0) != phi_max` (`H_2`), and one compactly supported bump.
    fn default() -> Self {
        FamilySeed {
            gaussians: vec![
                (0.0, 1.0),
                (0.0, 2.0),
                (0.5, 1.0),
                (-0.5, 0.5),
                (2.0, 0.5),
                (-2.0, 2.0),
            ],
            hermites: vec![(1, 0.0, 1.0), (2, 0.0, 1.0)],
            bumps: vec![(0.0, 2.0)],
        }
    }
}

/// Expand a seed into its probe battery.  Deterministic: identical seeds
/// yield identical lists, in a fixed order (gaussians, hermites, bumps).
pub fn shifted_family(seed: &FamilySeed) -> Result<Vec<TestFunction>, ProbeError> {
    let mut out = Vec::with_capacity(seed.gaussians.len() + seed.hermites.len() + seed.bumps.len());
    for &(c, w) in &seed.gaussians {
        out.push(TestFunction::gaussian(c, w)?);
    }
    for &(m, c, w) in &seed.hermites {
        out.push(TestFunction::hermite(m, c, w)?);
    }
    for &(c, w) in &seed.bumps {
        out.push(TestFunction::bump(c, w)?);
    }
    Ok(out)
}
