//! Scalar special functions: the hyperbolic kernels and their stable forms.
//!
//! Every kernel that appears inside a pairing integrand lives here, each in a
//! form chosen so that no catastrophic cancellation occurs anywhere in its
//! domain:
//!
//! * `coth y = (e^{2y} + 1)/(e^{2y} - 1) = 1 + 2/expm1(2y)` — exact at both
//!   ends: for `y -> 0` the `expm1` keeps full precision, for large `|y|` it
//!   saturates cleanly at `±1`.
//! * `decompose_sign(y) = sign(y) (1 + 2/expm1(2|y|))` — the sign/Langevin
//!   split of `coth`, written so the bounded remainder is explicit.
//! * `csch^2 y - 1/y^2 = -(sinh y - y)(sinh y + y)/(y sinh y)^2`, with
//!   `sinh y - y` summed by its Taylor series for `|y| < 1` — this is the
//!   smooth part of the standardized `csch^2`, finite at the origin with
//!   value `-1/3`.
//! * `langevin(y) = coth y - 1/y`, Taylor below `|y| = 1e-2` (degree 7).
//! * The `eps`-shifted real/imaginary parts
//!   `Re coth(y + i eps) = sinh 2y / (2 (sinh^2 y + sin^2 eps))`,
//!   `Im coth(y + i eps) = -sin 2eps / (2 (sinh^2 y + sin^2 eps))`,
//!   via half-angle products so no subtraction of like terms occurs.
//! * Partial-fraction series for `coth` and `csch^2` with explicit tail
//!   corrections, summed smallest term first.
//!
//! Exact Bernoulli machinery is in [`bernoulli`].

pub mod bernoulli;

use std::fmt;

/// Domain errors for the scalar kernels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecialError {
    /// The kernel has a pole at `y = 0` and was evaluated there.
    ZeroArgument { what: &'static str },
    /// An `eps`-shifted kernel needs `eps > 0`.
    NonPositiveEps { what: &'static str },
    /// A series truncation must keep at least one term.
    EmptyTruncation,
}

impl fmt::Display for SpecialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecialError::ZeroArgument { what } => {
                write!(f, "{what} has a pole at y = 0; evaluate away from the origin")
            }
            SpecialError::NonPositiveEps { what } => {
                write!(f, "{what} requires a strictly positive eps")
            }
            SpecialError::EmptyTruncation => write!(f, "series truncation must satisfy K >= 1"),
        }
    }
}

impl std::error::Error for SpecialError {}

/// Truncation policy for the partial-fraction series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesTruncation {
    /// Number of partial-fraction terms kept.
    pub k: u64,
    /// Whether the closed-form tail estimate for the dropped terms is added.
    pub tail_correction: bool,
}

impl SeriesTruncation {
    pub fn new(k: u64, tail_correction: bool) -> Result<Self, SpecialError> {
        if k == 0 {
            return Err(SpecialError::EmptyTruncation);
        }
        Ok(SeriesTruncation { k, tail_correction })
    }
}

/// `coth` without the domain check, for integrands that guarantee `y != 0`.
#[inline]
pub(crate) fn coth_raw(y: f64) -> f64 {
    1.0 + 2.0 / f64::exp_m1(2.0 * y)
}

/// Hyperbolic cotangent in the stable `1 + 2/expm1(2y)` form.
pub fn coth_direct(y: f64) -> Result<f64, SpecialError> {
    if y == 0.0 {
        return Err(SpecialError::ZeroArgument { what: "coth" });
    }
    Ok(coth_raw(y))
}

/// `coth` as `sign(y) + bounded remainder`, the decomposition that isolates
/// the distributionally active step part from the smooth rest.
pub fn decompose_sign(y: f64) -> Result<f64, SpecialError> {
    if y == 0.0 {
        return Err(SpecialError::ZeroArgument { what: "decompose_sign" });
    }
    Ok(y.signum() * (1.0 + 2.0 / f64::exp_m1(2.0 * y.abs())))
}

#[inline]
pub(crate) fn csch2_raw(y: f64) -> f64 {
    let s = y.sinh();
    1.0 / (s * s)
}

/// `csch^2 y = 1/sinh^2 y`.
pub fn csch2_direct(y: f64) -> Result<f64, SpecialError> {
    if y == 0.0 {
        return Err(SpecialError::ZeroArgument { what: "csch^2" });
    }
    Ok(csch2_raw(y))
}

/// `sinh y - y` by Taylor series; accurate for `|y| < 1` where the direct
/// difference loses all leading digits.
fn sinh_minus_y(y: f64) -> f64 {
    let y2 = y * y;
    let mut term = y * y2 / 6.0;
    let mut sum = term;
    let mut k = 1u32;
    loop {
        term *= y2 / ((2 * k + 2) as f64 * (2 * k + 3) as f64);
        let next = sum + term;
        if next == sum {
            return sum;
        }
        sum = next;
        k += 1;
    }
}

/// The smooth part of the standardized kernel: `csch^2 y - 1/y^2`.
///
/// Continuous on all of the real line with value `-1/3` at the origin; this
/// is what makes the finite-part pairing of `csch^2` computable without any
/// cancellation near `y = 0`.
pub fn csch2_minus_inv_y2(y: f64) -> f64 {
    let a = y.abs();
    if a < 1e-4 {
        let y2 = y * y;
        return -1.0 / 3.0 + y2 / 15.0 - 2.0 * y2 * y2 / 189.0;
    }
    if a < 1.0 {
        let s = y.sinh();
        let ys = y * s;
        return -(sinh_minus_y(y) * (s + y)) / (ys * ys);
    }
    csch2_raw(y) - 1.0 / (y * y)
}

const LANGEVIN_SWITCH: f64 = 1e-2;

/// `langevin(y) = coth y - 1/y`, the bounded odd part of `coth`.
///
/// Below `|y| = 1e-2` the degree-7 Taylor polynomial
/// `y/3 - y^3/45 + 2 y^5/945 - y^7/4725` is used; above it the subtraction is
/// benign.  Continuous through `y = 0` with `langevin(0) = 0`.
pub fn langevin(y: f64) -> f64 {
    if y.abs() < LANGEVIN_SWITCH {
        let y2 = y * y;
        return y * (1.0 / 3.0 + y2 * (-1.0 / 45.0 + y2 * (2.0 / 945.0 - y2 / 4725.0)));
    }
    coth_raw(y) - 1.0 / y
}

/// `Re coth(y + i eps)` for `eps > 0`: `sinh y cosh y / (sinh^2 y + sin^2 eps)`.
///
/// Total in `y` (zero at `y = 0`), odd in `y`; converges pointwise to `coth`
/// away from the origin as `eps -> 0`.
pub fn coth_eps_real(y: f64, eps: f64) -> Result<f64, SpecialError> {
    if !(eps > 0.0) {
        return Err(SpecialError::NonPositiveEps { what: "coth_eps_real" });
    }
    if y.abs() >= 100.0 {
        // sin^2 eps / sinh^2 y < 1e-86: indistinguishable from coth.
        return Ok(coth_raw(y));
    }
    let t = y.sinh();
    let s = eps.sin();
    Ok(t * y.cosh() / (t * t + s * s))
}

/// `Im coth(y + i eps)` for `eps > 0`: `-sin eps cos eps / (sinh^2 y + sin^2 eps)`.
///
/// Even in `y`, strictly negative, a nascent `-pi delta(y)` as `eps -> 0`.
pub fn coth_eps_imag(y: f64, eps: f64) -> Result<f64, SpecialError> {
    if !(eps > 0.0) {
        return Err(SpecialError::NonPositiveEps { what: "coth_eps_imag" });
    }
    let t = y.sinh();
    let s = eps.sin();
    Ok(-s * eps.cos() / (t * t + s * s))
}

/// Partial-fraction series for `coth`:
/// `1/y + sum_{k=1}^{K} 2y/(y^2 + k^2 pi^2)`, summed from the smallest term
/// (`k = K`) upward.  With `tail_correction` the integral estimate
/// `2y/(pi^2 K)` of the dropped terms is added, improving the truncation
/// error from `O(y/K)` to `O(y/K^2)`.
pub fn coth_series(y: f64, trunc: SeriesTruncation) -> Result<f64, SpecialError> {
    if y == 0.0 {
        return Err(SpecialError::ZeroArgument { what: "coth_series" });
    }
    let y2 = y * y;
    let mut sum = 0.0;
    let mut k = trunc.k;
    while k >= 1 {
        let kp = k as f64 * std::f64::consts::PI;
        sum += 2.0 * y / (y2 + kp * kp);
        k -= 1;
    }
    let mut value = 1.0 / y + sum;
    if trunc.tail_correction {
        value += 2.0 * y / (std::f64::consts::PI.powi(2) * trunc.k as f64);
    }
    Ok(value)
}

/// Partial-fraction series for `csch^2`:
/// `1/y^2 + sum_{k=1}^{K} 2 (y^2 - k^2 pi^2)/(y^2 + k^2 pi^2)^2`, smallest
/// term first, with optional tail `-2/(pi^2 K)`.
pub fn csch2_series(y: f64, trunc: SeriesTruncation) -> Result<f64, SpecialError> {
    if y == 0.0 {
        return Err(SpecialError::ZeroArgument { what: "csch2_series" });
    }
    let y2 = y * y;
    let mut sum = 0.0;
    let mut k = trunc.k;
    while k >= 1 {
        let kp2 = (k as f64 * std::f64::consts::PI).powi(2);
        let denom = y2 + kp2;
        sum += 2.0 * (y2 - kp2) / (denom * denom);
        k -= 1;
    }
    let mut value = 1.0 / y2 + sum;
    if trunc.tail_correction {
        value += -2.0 / (std::f64::consts::PI.powi(2) * trunc.k as f64);
    }
    Ok(value)
}

/// Sharper tail for the `coth` partial-fraction series: the midpoint-rule
/// integral of the dropped terms,
/// `sum_{k>K} 2y/(y^2 + k^2 pi^2) ~ (2/pi) atan(y / ((K + 1/2) pi))`.
///
/// Used by the decomposition checks, where a modest `K` must still deliver
/// ~1e-8 pointwise accuracy.
pub(crate) fn coth_series_tail_midpoint(y: f64, k: u64) -> f64 {
    std::f64::consts::FRAC_2_PI * (y / ((k as f64 + 0.5) * std::f64::consts::PI)).atan()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const COTH_1: f64 = 1.313_035_285_499_331_3;
    const CSCH2_1: f64 = 0.724_061_660_966_310_5;

    #[test]
    fn coth_reference_values() {
        assert!((coth_direct(1.0).unwrap() - COTH_1).abs() < 1e-15);
        assert!((coth_direct(-1.0).unwrap() + COTH_1).abs() < 1e-15);
        // Saturation: exactly the mathematical limit once expm1 overflows.
        assert_eq!(coth_direct(400.0).unwrap(), 1.0);
        // Small argument: leading 1/y with no precision loss.  At y = 1e-4
        // the residue y/3 is still far above the ulp of 1/y, so the Taylor
        // behaviour of the direct form is visible.
        let y = 1e-4;
        assert!(((coth_direct(y).unwrap() - 1.0 / y) - y / 3.0).abs() < 1e-11);
        assert_eq!(coth_direct(0.0), Err(SpecialError::ZeroArgument { what: "coth" }));
    }

    #[test]
    fn csch2_reference_and_pythagorean_identity() {
        assert!((csch2_direct(1.0).unwrap() - CSCH2_1).abs() < 1e-15);
        for &y in &[0.3, 0.7, 1.0, 2.5, 5.0, -1.2] {
            let c = coth_direct(y).unwrap();
            let s = csch2_direct(y).unwrap();
            assert!(
                ((c * c - 1.0) - s).abs() <= 1e-13 * s.abs().max(1.0),
                "coth^2 - 1 = csch^2 fails at y = {y}"
            );
        }
    }

    #[test]
    fn subtracted_csch2_is_smooth_through_origin() {
        // Value at the origin and agreement of the three branches.
        assert!((csch2_minus_inv_y2(0.0) + 1.0 / 3.0).abs() < 1e-16);
        assert!((csch2_minus_inv_y2(1e-6) + 1.0 / 3.0).abs() < 1e-12);
        // Taylor branch vs quotient branch at the 1e-4 switch.
        let a = csch2_minus_inv_y2(0.999e-4);
        let b = -(sinh_minus_y(0.999e-4) * ((0.999e-4_f64).sinh() + 0.999e-4))
            / ((0.999e-4 * (0.999e-4_f64).sinh()).powi(2));
        assert!((a - b).abs() < 1e-16);
        // Quotient branch vs direct difference at the |y| = 1 switch.
        let c = csch2_minus_inv_y2(0.999_999);
        let d = csch2_raw(0.999_999) - 1.0 / (0.999_999_f64 * 0.999_999);
        assert!((c - d).abs() < 1e-13);
        // Known Taylor: csch^2 y - 1/y^2 = -1/3 + y^2/15 - 2y^4/189 + ...
        let y = 0.3_f64;
        let taylor = -1.0 / 3.0 + y * y / 15.0 - 2.0 * y.powi(4) / 189.0 + y.powi(6) / 675.0
            - 2.0 * y.powi(8) / 10395.0;
        assert!((csch2_minus_inv_y2(y) - taylor).abs() < 2e-10);
    }

    #[test]
    fn langevin_values_and_switch_continuity() {
        assert!((langevin(1.0) - (COTH_1 - 1.0)).abs() < 1e-15);
        assert!((langevin(1e6) - (1.0 - 1e-6)).abs() < 1e-15);
        assert_eq!(langevin(0.0), 0.0);
        // Odd parity, up to the subtraction's cancellation floor eps/y in
        // the direct branch (the Taylor branch below 1e-2 is exactly odd).
        for &y in &[1e-3_f64, 0.05, 0.7, 3.0] {
            assert!((langevin(-y) + langevin(y)).abs() < 5e-15 / y.min(1.0));
        }
        // Across the Taylor switch the two branches must agree to the level
        // set by cancellation in the direct form (~ eps / y^2).
        let y = LANGEVIN_SWITCH;
        let y2 = y * y;
        let poly = y * (1.0 / 3.0 + y2 * (-1.0 / 45.0 + y2 * (2.0 / 945.0 - y2 / 4725.0)));
        let direct = coth_raw(y) - 1.0 / y;
        assert!((poly - direct).abs() < 1e-13);
    }

    #[test]
    fn eps_shift_reference_values() {
        // Im coth(i eps) = -coth(eps) continued: at y = 0 the imaginary part
        // is -sin(2 eps)/(2 sin^2 eps) = -cot(eps).
        let v = coth_eps_imag(0.0, 0.01).unwrap();
        let cot = 1.0 / (0.01_f64).tan();
        assert!((v + cot).abs() < 1e-12 * cot);
        assert!((v - (-99.996_666_644_444_23)).abs() < 1e-11);
        // Real part vanishes at the origin and is odd.
        assert_eq!(coth_eps_real(0.0, 0.1).unwrap(), 0.0);
        for &y in &[0.02, 0.5, 3.0] {
            let p = coth_eps_real(y, 0.2).unwrap();
            let m = coth_eps_real(-y, 0.2).unwrap();
            assert!((p + m).abs() < 1e-15 * p.abs());
        }
        assert!(coth_eps_real(1.0, 0.0).is_err());
        assert!(coth_eps_imag(1.0, -0.1).is_err());
    }

    #[test]
    fn eps_shift_real_part_converges_to_coth() {
        let eps = 1e-8;
        for &y in &[0.011, 0.02, 0.1, 1.0, 5.0, -0.011, -2.0] {
            let shifted = coth_eps_real(y, eps).unwrap();
            let direct = coth_raw(y);
            assert!(
                (shifted - direct).abs() < 1e-10,
                "y = {y}: |shifted - coth| = {:e}",
                (shifted - direct).abs()
            );
        }
        // Large |y| branch joins smoothly.
        assert!((coth_eps_real(100.0, 0.3).unwrap() - 1.0).abs() < 1e-15);
        assert!(coth_eps_real(500.0, 0.3).unwrap().is_finite());
    }

    #[test]
    fn decompose_sign_matches_coth_and_saturates() {
        for &y in &[0.01, 0.3, 1.0, 5.0, 20.0, -0.3, -7.0] {
            let ds = decompose_sign(y).unwrap();
            let c = coth_raw(y);
            assert!((ds - c).abs() <= 1e-13 * c.abs(), "y = {y}");
        }
        // At y = 30 the remainder 2/expm1(60) ~ 1.75e-26 is below f64
        // resolution around 1, so the value is exactly 1.
        assert_eq!(decompose_sign(30.0).unwrap(), 1.0);
        let remainder = 2.0 / f64::exp_m1(60.0);
        assert!((remainder - 1.75e-26).abs() < 0.01e-26);
    }

    #[test]
    fn series_partial_sums_and_tails() {
        // K = 1 partial sum at y = 1, no tail: 1 + 2/(1 + pi^2).
        let one_term = coth_series(1.0, SeriesTruncation::new(1, false).unwrap()).unwrap();
        assert!((one_term - (1.0 + 2.0 / (1.0 + PI * PI))).abs() < 1e-15);
        // The tail flag matters: at K = 1000 the bare sum misses by ~1e-4.
        let y = 0.5;
        let exact = coth_raw(y);
        let bare = coth_series(y, SeriesTruncation::new(1000, false).unwrap()).unwrap();
        let tailed = coth_series(y, SeriesTruncation::new(1000, true).unwrap()).unwrap();
        assert!((bare - exact).abs() > 5e-5);
        assert!((tailed - exact).abs() < 1e-7);
        // Same structure for csch^2.
        let exact2 = csch2_raw(y);
        let bare2 = csch2_series(y, SeriesTruncation::new(1000, false).unwrap()).unwrap();
        let tailed2 = csch2_series(y, SeriesTruncation::new(1000, true).unwrap()).unwrap();
        assert!((bare2 - exact2).abs() > 1e-4);
        assert!((tailed2 - exact2).abs() < 1e-6);
        assert_eq!(SeriesTruncation::new(0, true), Err(SpecialError::EmptyTruncation));
    }

    #[test]
    fn midpoint_tail_is_much_sharper() {
        // At K = 200 the midpoint-arctan tail leaves ~2e-9 error where the
        // plain integral tail leaves ~1e-8 .. 1e-7.
        for &y in &[0.1, 0.5, 1.0, 3.0, 10.0] {
            let k = 200u64;
            let bare = coth_series(y, SeriesTruncation::new(k, false).unwrap()).unwrap();
            let sharp = bare + coth_series_tail_midpoint(y, k);
            assert!(
                (sharp - coth_raw(y)).abs() < 2.2e-8,
                "y = {y}: err {:e}",
                (sharp - coth_raw(y)).abs()
            );
        }
    }
}
