//! Exact Bernoulli numbers and Bernoulli polynomials.
//!
//! Numbers are produced by the Akiyama–Tanigawa triangle over
//! arbitrary-precision rationals and cached process-wide, so every consumer
//! sees the same exact values.  The triangle natively yields the `B_1 = +1/2`
//! convention; the sign is flipped at index 1 so the public values follow the
//! standard `B_1 = -1/2` convention used by the zeta/moment closed forms:
//!
//! ```text
//! B_n(x) = sum_{k=0}^{n} C(n,k) B_k x^{n-k},   B_n = B_n(0).
//! ```

use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

static CACHE: RwLock<Vec<BigRational>> = RwLock::new(Vec::new());

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Extend the cache so indices `0..=n` are present.
fn ensure(n: usize) {
    {
        let cache = CACHE.read().expect("bernoulli cache poisoned");
        if cache.len() > n {
            return;
        }
    }
    let mut cache = CACHE.write().expect("bernoulli cache poisoned");
    if cache.len() > n {
        return;
    }
    // Akiyama–Tanigawa: row 0 is 1/(m+1); each transform step produces the
    // next Bernoulli number (B_1 = +1/2 convention) at column 0.
    let mut row: Vec<BigRational> = (0..=n).map(|m| big(1) / big(m as i64 + 1)).collect();
    let mut out: Vec<BigRational> = Vec::with_capacity(n + 1);
    out.push(row[0].clone());
    for j in 1..=n {
        for m in 0..=(n - j) {
            let diff = &row[m] - &row[m + 1];
            row[m] = big(m as i64 + 1) * diff;
        }
        out.push(row[0].clone());
    }
    if n >= 1 {
        out[1] = -out[1].clone();
    }
    *cache = out;
}

/// Exact Bernoulli number `B_n` (convention `B_1 = -1/2`).
pub fn bernoulli_number(n: u32) -> BigRational {
    ensure(n as usize);
    CACHE.read().expect("bernoulli cache poisoned")[n as usize].clone()
}

/// `B_n` rounded to `f64`.
pub fn bernoulli_number_f64(n: u32) -> f64 {
    bernoulli_number(n)
        .to_f64()
        .expect("bernoulli number exceeds f64 range")
}

/// Bernoulli polynomial `B_n(x)` evaluated in `f64`.
///
/// The binomial coefficients are built by the exact multiplicative
/// recurrence; for the orders used here (`n <= 20` or so) every coefficient
/// is exactly representable, so the only rounding is in the final sum.
pub fn bernoulli_polynomial(n: u32, x: f64) -> f64 {
    ensure(n as usize);
    let cache = CACHE.read().expect("bernoulli cache poisoned");
    let mut binom = 1.0_f64;
    let mut xpow = 1.0_f64;
    // Accumulate from k = n down to 0 so xpow grows as x^(n-k).
    let mut sum = 0.0;
    for k in (0..=n).rev() {
        let b = cache[k as usize].to_f64().expect("bernoulli number exceeds f64 range");
        sum += binom * b * xpow;
        if k > 0 {
            // C(n, k-1) = C(n, k) * k / (n - k + 1)
            binom = binom * k as f64 / (n - k + 1) as f64;
            xpow *= x;
        }
    }
    sum
}

/// Exact-rational Bernoulli polynomial, for identity tests.
pub fn bernoulli_polynomial_rational(n: u32, x: &BigRational) -> BigRational {
    ensure(n as usize);
    let cache = CACHE.read().expect("bernoulli cache poisoned");
    let mut binom = BigRational::one();
    let mut xpow = BigRational::one();
    let mut sum = BigRational::zero();
    for k in (0..=n).rev() {
        sum += &binom * &cache[k as usize] * &xpow;
        if k > 0 {
            binom = binom * big(k as i64) / big((n - k + 1) as i64);
            xpow *= x;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational(num: i64, den: i64) -> BigRational {
        big(num) / big(den)
    }

    #[test]
    fn known_values_exact() {
        assert_eq!(bernoulli_number(0), rational(1, 1));
        assert_eq!(bernoulli_number(1), rational(-1, 2));
        assert_eq!(bernoulli_number(2), rational(1, 6));
        assert_eq!(bernoulli_number(4), rational(-1, 30));
        assert_eq!(bernoulli_number(6), rational(1, 42));
        assert_eq!(bernoulli_number(12), rational(-691, 2730));
    }

    #[test]
    fn odd_indices_vanish() {
        for m in 1..=19u32 {
            assert!(bernoulli_number(2 * m + 1).is_zero(), "B_{} != 0", 2 * m + 1);
        }
    }

    #[test]
    fn defining_recurrence_holds_exactly() {
        // sum_{k=0}^{n} C(n+1, k) B_k = 0 for n >= 1, with exact arithmetic.
        for n in 1..=40u32 {
            let mut sum = BigRational::zero();
            let mut binom = BigInt::one(); // C(n+1, 0)
            for k in 0..=n {
                sum += BigRational::from_integer(binom.clone()) * bernoulli_number(k);
                binom = binom * BigInt::from(n + 1 - k) / BigInt::from(k + 1);
            }
            assert!(sum.is_zero(), "recurrence fails at n = {n}");
        }
    }

    #[test]
    fn polynomial_special_values() {
        // B_3(1/4) = 3/64, exact.
        let x = rational(1, 4);
        assert_eq!(bernoulli_polynomial_rational(3, &x), rational(3, 64));
        assert!((bernoulli_polynomial(3, 0.25) - 3.0 / 64.0).abs() < 1e-16);
        // B_n(0) = B_n, B_n(1) = B_n for n != 1.
        for n in [0u32, 2, 3, 4, 5, 8] {
            let bn = bernoulli_number_f64(n);
            assert!((bernoulli_polynomial(n, 0.0) - bn).abs() < 1e-15);
            if n != 1 {
                assert!((bernoulli_polynomial(n, 1.0) - bn).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn polynomial_reflection() {
        // B_n(1 - x) = (-1)^n B_n(x)
        for n in 1..=9u32 {
            for &x in &[0.1, 0.25, 0.4, 0.77] {
                let lhs = bernoulli_polynomial(n, 1.0 - x);
                let rhs = if n % 2 == 0 { 1.0 } else { -1.0 } * bernoulli_polynomial(n, x);
                assert!((lhs - rhs).abs() < 1e-13, "n={n} x={x}");
            }
        }
    }
}
