//! Exponent optimization over the integer parameter `c`.
//!
//! If some `m` has `r` divisors in the square window then, for every
//! `1 <= c <= r - 1`, `k^(c^2 + r^2 + c - r) >> N^(2rc - c^2 - c)`; for cubes the
//! right exponent is `4rc - 2c^2 - r^2 - 2c + r`. The best exponent for a given
//! `r` is the largest ratio over `c`, found here by exhaustive exact
//! comparison. As `r` grows with `c ~ alpha r` the ratios tend to
//! `(2a - a^2)/(1 + a^2)` and `(4a - 2a^2 - 1)/(1 + a^2)`, maximized at
//! `(sqrt5 - 1)/2` and `(sqrt17 - 1)/4` with maxima `(sqrt5 - 1)/2` and
//! `(sqrt17 - 3)/2`.

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::Power;

/// Largest `r` accepted; keeps every cross product inside `i128`.
pub const MAX_R: u64 = 1_000_000_000;

/// Limiting exponent for squares, `(sqrt5 - 1)/2`.
pub fn gamma0() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Limiting exponent for cubes, `(sqrt17 - 3)/2`.
pub fn gamma1() -> f64 {
    (17f64.sqrt() - 3.0) / 2.0
}

/// Maximizer of the cube objective, `(sqrt17 - 1)/4`.
pub fn beta() -> f64 {
    (17f64.sqrt() - 1.0) / 4.0
}

/// Formats a rational as `p/q` (always with a denominator).
pub fn format_ratio(x: &Ratio<i128>) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn serialize_ratio<S: Serializer>(x: &Ratio<i128>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(x))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentResult {
    pub r: u64,
    pub power: Power,
    pub best_c: u64,
    #[serde(serialize_with = "serialize_ratio")]
    pub gamma_r: Ratio<i128>,
    pub gamma_r_float: f64,
}

/// `(numerator, denominator)` of the objective at `c`; the denominator is positive.
pub fn objective(power: Power, r: u64, c: u64) -> (i128, i128) {
    let (r, c) = (i128::from(r), i128::from(c));
    let den = c * c + r * r + c - r;
    let num = match power {
        Power::Square => 2 * r * c - c * c - c,
        Power::Cube => 4 * r * c - 2 * c * c - r * r - 2 * c + r,
    };
    (num, den)
}

/// Maximizes the objective over `1 <= c <= r - 1`, smallest `c` on ties.
pub fn best_exponent(power: Power, r: u64) -> Result<ExponentResult> {
    if r < 3 {
        return Err(Error::domain("r", r, "at least 3"));
    }
    if r > MAX_R {
        return Err(Error::domain("r", r, "at most 10^9"));
    }
    let mut best_c = 1;
    let (mut best_num, mut best_den) = objective(power, r, 1);
    for c in 2..r {
        let (num, den) = objective(power, r, c);
        if num * best_den > best_num * den {
            best_c = c;
            best_num = num;
            best_den = den;
        }
    }
    Ok(ExponentResult {
        r,
        power,
        best_c,
        gamma_r: Ratio::new(best_num, best_den),
        gamma_r_float: best_num as f64 / best_den as f64,
    })
}

pub fn square_exponent(r: u64) -> Result<ExponentResult> {
    best_exponent(Power::Square, r)
}

pub fn cube_exponent(r: u64) -> Result<ExponentResult> {
    best_exponent(Power::Cube, r)
}

/// Best exponents for every `r` in `[r_lo, r_hi]`.
pub fn exponent_table(power: Power, r_lo: u64, r_hi: u64) -> Result<Vec<ExponentResult>> {
    if r_lo > r_hi {
        return Err(Error::domain(
            "r range",
            format!("[{r_lo}, {r_hi}]"),
            "nonempty",
        ));
    }
    (r_lo..=r_hi).map(|r| best_exponent(power, r)).collect()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha", alpha, "0 < alpha < 1"));
    }
    Ok(())
}

/// The limiting objective at `c = alpha r`.
pub fn continuous_objective(power: Power, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(continuous_value(power, alpha))
}

fn continuous_value(power: Power, a: f64) -> f64 {
    let den = 1.0 + a * a;
    match power {
        Power::Square => (2.0 * a - a * a) / den,
        Power::Cube => (4.0 * a - 2.0 * a * a - 1.0) / den,
    }
}

/// Sign-carrying numerator `P'Q - PQ'` of the objective's derivative.
fn derivative_numerator(power: Power, a: f64) -> f64 {
    let (p, dp) = match power {
        Power::Square => (2.0 * a - a * a, 2.0 - 2.0 * a),
        Power::Cube => (4.0 * a - 2.0 * a * a - 1.0, 4.0 - 4.0 * a),
    };
    dp * (1.0 + a * a) - p * 2.0 * a
}

/// Maximizer of the continuous objective on `(0, 1)`: a grid locates the sign
/// change of the derivative, bisection refines it to machine precision.
pub fn continuous_argmax(power: Power) -> f64 {
    const GRID: usize = 1000;
    let mut lo = 0.0;
    let mut hi = 1.0;
    for i in 1..GRID {
        let a = i as f64 / GRID as f64;
        let b = (i + 1) as f64 / GRID as f64;
        if derivative_numerator(power, a) > 0.0 && derivative_numerator(power, b) <= 0.0 {
            lo = a;
            hi = b;
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if derivative_numerator(power, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Window size suggested by the exponent for a given `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KThreshold {
    pub exponent: f64,
    /// `floor(N^gamma_r)`, at least 1.
    pub k_star: u128,
}

/// `k_star = floor(N^gamma_r)`. Advisory only: the absolute constants in the
/// underlying bound are not known, so nothing is asserted about `k_star`.
pub fn k_threshold_report(n: u128, r: u64, power: Power) -> Result<KThreshold> {
    if n == 0 {
        return Err(Error::domain("N", n, "a positive integer"));
    }
    let result = best_exponent(power, r)?;
    let exponent = result.gamma_r_float;
    let (p, q) = (*result.gamma_r.numer(), *result.gamma_r.denom());
    if p <= 0 {
        return Ok(KThreshold {
            exponent,
            k_star: 1,
        });
    }
    let mut k = (n as f64).powf(exponent).floor().max(1.0) as u128;
    // Exact correction of the float estimate when k^q <= N^p is cheap to test.
    if q <= 64 && (p as f64) * (n as f64).log2() <= 1.0e5 {
        let (p, q) = (p as u32, q as u32);
        let target = BigUint::from(n).pow(p);
        let fits = |k: u128| BigUint::from(k).pow(q) <= target;
        while k > 1 && !fits(k) {
            k -= 1;
        }
        while fits(k + 1) {
            k += 1;
        }
    }
    Ok(KThreshold {
        exponent,
        k_star: k,
    })
}
