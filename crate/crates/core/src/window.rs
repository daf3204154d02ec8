//! Short-interval divisor counts and the window sieve.
//!
//! A positive difference of two squares from `{(N+s)^2 : 0 <= s <= k}` factors
//! as `(s1 - s2)(2N + s1 + s2)`, so it has a divisor in `[2N, 2N + 2k]` for
//! every representation and is at most `3Nk`. For cubes the divisor lies in
//! `[3N^2, 3N^2 + 9Nk]` and the difference is at most `7N^2 k`. Scanning the
//! maximal `tau(m; window)` over those ranges is done in reverse: each `d` in
//! the window marks its multiples, and only marked `m` are ever stored.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::arith::{divisors_in_range, DivisorRange, VALUE_LIMIT};
use crate::error::{Error, Result};
use crate::parallel;
use crate::Power;

/// `tau(m; lo, hi)`: the number of divisors of `m` in the range.
pub fn tau_interval(m: u128, range: DivisorRange) -> Result<u64> {
    Ok(divisors_in_range(m, range)?.len() as u64)
}

/// Summary of a window sieve over all `m <= m_limit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowScanReport {
    pub power: Power,
    pub n: u128,
    pub k: u128,
    pub m_limit: u128,
    pub window: DivisorRange,
    pub max_tau: u64,
    /// Smallest `m` attaining `max_tau`.
    pub argmax_m: Option<u128>,
    /// `tau` value to the number of `m` with that many window divisors (`tau >= 1`).
    pub histogram: BTreeMap<u64, u64>,
}

impl WindowScanReport {
    /// Number of `m` that had at least one divisor in the window.
    pub fn touched(&self) -> u64 {
        self.histogram.values().sum()
    }
}

fn check_nk(n: u128, k: u128) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("N", n, "a positive integer"));
    }
    if k == 0 || k > n {
        return Err(Error::domain("k", k, "1 <= k <= N"));
    }
    Ok(())
}

fn too_large() -> Error {
    Error::domain(
        "N, k",
        "too large",
        "values whose scan range stays below 2^96",
    )
}

/// Divisor window and `m` bound for the squares `{(N+s)^2 : 0 <= s <= k}`.
pub fn square_window(n: u128, k: u128) -> Result<(DivisorRange, u128)> {
    check_nk(n, k)?;
    let lo = n.checked_mul(2).ok_or_else(too_large)?;
    let hi = k
        .checked_mul(2)
        .and_then(|x| x.checked_add(lo))
        .ok_or_else(too_large)?;
    let m_limit = n
        .checked_mul(k)
        .and_then(|x| x.checked_mul(3))
        .filter(|&x| x < VALUE_LIMIT)
        .ok_or_else(too_large)?;
    Ok((DivisorRange::new(lo, hi)?, m_limit))
}

/// Divisor window and `m` bound for the cubes `{(N+s)^3 : 0 <= s <= k}`.
pub fn cube_window(n: u128, k: u128) -> Result<(DivisorRange, u128)> {
    check_nk(n, k)?;
    let n2 = n.checked_mul(n).ok_or_else(too_large)?;
    let lo = n2.checked_mul(3).ok_or_else(too_large)?;
    let hi = n
        .checked_mul(k)
        .and_then(|x| x.checked_mul(9))
        .and_then(|x| x.checked_add(lo))
        .ok_or_else(too_large)?;
    let m_limit = n2
        .checked_mul(k)
        .and_then(|x| x.checked_mul(7))
        .filter(|&x| x < VALUE_LIMIT)
        .ok_or_else(too_large)?;
    Ok((DivisorRange::new(lo, hi)?, m_limit))
}

/// For every `m <= m_limit` with a divisor in `window`, the number of such divisors.
///
/// The window is split into contiguous `d`-subranges, one per worker; partial
/// counts are summed per key, so the result does not depend on `workers`.
pub fn window_sieve(window: DivisorRange, m_limit: u128, workers: usize) -> BTreeMap<u128, u64> {
    let hi = window.hi.min(m_limit);
    if window.lo > hi {
        return BTreeMap::new();
    }
    let partials = parallel::map_chunks(window.lo, hi, workers, |lo, hi| {
        let mut counts: HashMap<u128, u64> = HashMap::new();
        for d in lo..=hi {
            let mut m = d;
            while m <= m_limit {
                *counts.entry(m).or_insert(0) += 1;
                m += d;
            }
        }
        counts
    });
    let mut merged = BTreeMap::new();
    for part in partials {
        for (m, c) in part {
            *merged.entry(m).or_insert(0) += c;
        }
    }
    merged
}

/// Builds the report for sieve output `counts` and re-checks the argmax directly.
pub fn summarize_scan(
    power: Power,
    n: u128,
    k: u128,
    window: DivisorRange,
    m_limit: u128,
    counts: &BTreeMap<u128, u64>,
) -> Result<WindowScanReport> {
    let mut histogram = BTreeMap::new();
    let mut max_tau = 0;
    let mut argmax_m = None;
    for (&m, &c) in counts {
        *histogram.entry(c).or_insert(0) += 1;
        // keys ascend, so strict improvement keeps the smallest m
        if c > max_tau {
            max_tau = c;
            argmax_m = Some(m);
        }
    }
    if let Some(m) = argmax_m {
        let direct = tau_interval(m, window)?;
        if direct != max_tau {
            return Err(Error::Invariant(format!(
                "sieve count {max_tau} at m = {m} disagrees with direct tau {direct}"
            )));
        }
    }
    Ok(WindowScanReport {
        power,
        n,
        k,
        m_limit,
        window,
        max_tau,
        argmax_m,
        histogram,
    })
}

/// `max_{m <= 3Nk} tau(m; 2N, 2N + 2k)` with its full histogram.
pub fn square_window_scan(n: u128, k: u128, workers: usize) -> Result<WindowScanReport> {
    let (window, m_limit) = square_window(n, k)?;
    let counts = window_sieve(window, m_limit, workers);
    summarize_scan(Power::Square, n, k, window, m_limit, &counts)
}

/// `max_{m <= 7N^2 k} tau(m; 3N^2, 3N^2 + 9Nk)` with its full histogram.
pub fn cube_window_scan(n: u128, k: u128, workers: usize) -> Result<WindowScanReport> {
    let (window, m_limit) = cube_window(n, k)?;
    let counts = window_sieve(window, m_limit, workers);
    summarize_scan(Power::Cube, n, k, window, m_limit, &counts)
}

/// One row of a Ruzsa scan: divisors of `n` in `[sqrt(n), sqrt(n) + n^(1/2 - eps)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RuzsaRecord {
    pub n: u128,
    /// `ceil(sqrt(n))`.
    pub lo: u128,
    /// `floor(sqrt(n) + n^(1/2 - eps))`.
    pub hi: u128,
    pub count: u64,
    pub running_max: u64,
}

/// Integer bounds of the Ruzsa interval for `n`.
///
/// The lower end is exact. The upper end has an irrational offset and is
/// taken in double precision.
pub fn ruzsa_interval(n: u128, eps: f64) -> (u128, u128) {
    let root = n.isqrt();
    let lo = if root * root == n { root } else { root + 1 };
    let nf = n as f64;
    let hi = (nf.sqrt() + nf.powf(0.5 - eps)).floor() as u128;
    (lo, hi)
}

/// Evaluates the Ruzsa divisor count for every `n` in `[n_lo, n_hi]`.
pub fn ruzsa_scan(n_lo: u128, n_hi: u128, eps: f64) -> Result<Vec<RuzsaRecord>> {
    if n_lo == 0 {
        return Err(Error::domain("N_lo", n_lo, "a positive integer"));
    }
    if n_lo > n_hi {
        return Err(Error::domain("N_hi", n_hi, "at least N_lo"));
    }
    if n_hi >= VALUE_LIMIT {
        return Err(Error::domain("N_hi", n_hi, "below 2^96"));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::domain("eps", eps, "0 < eps < 1/2"));
    }
    let mut out = Vec::new();
    let mut running_max = 0;
    for n in n_lo..=n_hi {
        let (lo, hi) = ruzsa_interval(n, eps);
        let count = if lo <= hi {
            tau_interval(n, DivisorRange::new(lo, hi)?)?
        } else {
            0
        };
        running_max = running_max.max(count);
        out.push(RuzsaRecord {
            n,
            lo,
            hi,
            count,
            running_max,
        });
    }
    Ok(out)
}

/// All pairs `((N+s1)^2, (N+s2)^2)` with `0 <= s2 < s1 <= k` and difference `m`,
/// recovered from the divisors of `m` in `[2N, 2N + 2k]`. Ascending in `s1 + s2`.
pub fn square_representations(m: u128, n: u128, k: u128) -> Result<Vec<(u128, u128)>> {
    if m == 0 {
        return Err(Error::domain("m", m, "a positive integer"));
    }
    let (window, m_limit) = square_window(n, k)?;
    if m > m_limit {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for d in divisors_in_range(m, window)? {
        let e = m / d; // s1 - s2
        let t = d - 2 * n; // s1 + s2
        if t < e || !(t - e).is_multiple_of(2) {
            continue;
        }
        let s1 = (t + e) / 2;
        let s2 = (t - e) / 2;
        if s1 <= k {
            out.push(((n + s1) * (n + s1), (n + s2) * (n + s2)));
        }
    }
    Ok(out)
}
