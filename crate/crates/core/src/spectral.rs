//! Representation functions, additive energy and L2/L4 norms.
//!
//! For `f(x) = sum a_n e(nx)` the autocorrelation `c_m = sum_{n1-n2=m} a_n1 conj(a_n2)`
//! gives `|f|^2 = sum c_m e(mx)`, hence `||f||_2^2 = c_0` and
//! `||f||_4^4 = sum |c_m|^2`. With unit coefficients the latter is the
//! additive energy of the support. Everything here works by enumerating
//! pairs, since supports of interest are sparse inside huge ranges.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::arith::VALUE_LIMIT;
use crate::error::{Error, Result};
use crate::parallel;
use crate::Power;

/// Slack allowed when comparing an L4 norm against its algebraic bound.
pub const CERTIFICATE_RELATIVE_SLACK: f64 = 1e-9;

/// Largest sample count the quadrature oracle will allocate.
pub const QUADRATURE_MAX_POINTS: usize = 1 << 26;

/// A nonempty, strictly increasing list of frequencies below 2^96.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FrequencySet {
    elements: Vec<u128>,
}

impl FrequencySet {
    pub fn new(elements: Vec<u128>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Empty("frequency set"));
        }
        if let Some(i) = elements.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing { index: i + 1 });
        }
        if let Some(&last) = elements.last() {
            if last >= VALUE_LIMIT {
                return Err(Error::domain("frequency", last, "below 2^96"));
            }
        }
        Ok(Self { elements })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(elements: impl IntoIterator<Item = u128>) -> Result<Self> {
        let mut v: Vec<u128> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self::new(v)
    }

    /// `{n^2 : lo <= n <= hi}` or `{n^3 : lo <= n <= hi}`.
    pub fn powers(power: Power, lo: u128, hi: u128) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain("hi", hi, "at least lo"));
        }
        let exp = match power {
            Power::Square => 2,
            Power::Cube => 3,
        };
        if hi.checked_pow(exp).is_none_or(|v| v >= VALUE_LIMIT) {
            return Err(Error::domain("hi", hi, "a power below 2^96"));
        }
        Self::new((lo..=hi).map(|n| n.pow(exp)).collect())
    }

    /// The image `t + u * A` for `u >= 1`.
    pub fn affine(&self, t: u128, u: u128) -> Result<Self> {
        if u == 0 {
            return Err(Error::domain("u", u, "at least 1"));
        }
        let mut out = Vec::with_capacity(self.elements.len());
        for &a in &self.elements {
            let v = a
                .checked_mul(u)
                .and_then(|x| x.checked_add(t))
                .filter(|&x| x < VALUE_LIMIT)
                .ok_or_else(|| Error::domain("t + u*a", "overflow", "below 2^96"))?;
            out.push(v);
        }
        Self::new(out)
    }

    pub fn elements(&self) -> &[u128] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Sorted `(m, r(m))` for every positive difference `m` of `xs` (sorted, distinct).
fn positive_difference_runs<T>(xs: &[T], workers: usize) -> Vec<(u128, u64)>
where
    T: Copy + Sync + Into<i128>,
{
    let n = xs.len();
    if n < 2 {
        return Vec::new();
    }
    let chunks = parallel::map_chunks(0, (n - 2) as u128, workers, |lo, hi| {
        let mut diffs = Vec::new();
        for i in lo as usize..=hi as usize {
            let a: i128 = xs[i].into();
            diffs.extend(xs[i + 1..].iter().map(|&b| (b.into() - a) as u128));
        }
        diffs.sort_unstable();
        run_lengths(&diffs)
    });
    if chunks.len() == 1 {
        return chunks.into_iter().next().unwrap_or_default();
    }
    let mut all: Vec<(u128, u64)> = chunks.into_iter().flatten().collect();
    all.sort_unstable_by_key(|&(m, _)| m);
    let mut merged: Vec<(u128, u64)> = Vec::with_capacity(all.len());
    for (m, c) in all {
        match merged.last_mut() {
            Some((last, total)) if *last == m => *total += c,
            _ => merged.push((m, c)),
        }
    }
    merged
}

fn run_lengths(sorted: &[u128]) -> Vec<(u128, u64)> {
    let mut runs: Vec<(u128, u64)> = Vec::new();
    for &d in sorted {
        match runs.last_mut() {
            Some((m, c)) if *m == d => *c += 1,
            _ => runs.push((d, 1)),
        }
    }
    runs
}

/// `r_A(m)` for every `m` with at least one representation, including `m = 0`
/// and negative `m`.
pub fn representation_counts(set: &FrequencySet) -> BTreeMap<i128, u64> {
    representation_counts_with_workers(set, 1)
}

pub fn representation_counts_with_workers(
    set: &FrequencySet,
    workers: usize,
) -> BTreeMap<i128, u64> {
    let elems: Vec<i128> = set.elements.iter().map(|&a| a as i128).collect();
    let mut out = BTreeMap::new();
    out.insert(0, set.len() as u64);
    for (m, c) in positive_difference_runs(&elems, workers) {
        out.insert(m as i128, c);
        out.insert(-(m as i128), c);
    }
    out
}

/// `max_{m>0} r_A(m)`, zero for a singleton.
pub fn max_positive_representation(set: &FrequencySet) -> u64 {
    let elems: Vec<i128> = set.elements.iter().map(|&a| a as i128).collect();
    max_run(&positive_difference_runs(&elems, 1))
}

fn max_run(runs: &[(u128, u64)]) -> u64 {
    runs.iter().map(|&(_, c)| c).max().unwrap_or(0)
}

/// Number of quadruples `(a1, b1, a2, b2)` in `A^4` with `a1 + b1 = a2 + b2`.
pub fn additive_energy(set: &FrequencySet) -> u64 {
    additive_energy_with_workers(set, 1)
}

/// [`additive_energy`] with the pair enumeration split over `workers` threads.
pub fn additive_energy_with_workers(set: &FrequencySet, workers: usize) -> u64 {
    let elems: Vec<i128> = set.elements.iter().map(|&a| a as i128).collect();
    let size = set.len() as u64;
    let positive: u64 = positive_difference_runs(&elems, workers)
        .iter()
        .map(|&(_, c)| c * c)
        .sum();
    size * size + 2 * positive
}

/// A finite trigonometric polynomial `sum a_n e(nx)` with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPolynomial {
    terms: BTreeMap<i128, Complex64>,
}

impl TrigPolynomial {
    /// Collects terms, summing repeated frequencies and dropping zeros.
    /// Frequencies must satisfy `|n| < 2^96`.
    pub fn new(terms: impl IntoIterator<Item = (i128, Complex64)>) -> Result<Self> {
        let limit = VALUE_LIMIT as i128;
        let mut map: BTreeMap<i128, Complex64> = BTreeMap::new();
        for (n, a) in terms {
            if n <= -limit || n >= limit {
                return Err(Error::domain("frequency", n, "|n| < 2^96"));
            }
            *map.entry(n).or_default() += a;
        }
        map.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        Ok(Self { terms: map })
    }

    /// All coefficients equal to one on `set`.
    pub fn unit(set: &FrequencySet) -> Self {
        Self {
            terms: set
                .elements
                .iter()
                .map(|&a| (a as i128, Complex64::new(1.0, 0.0)))
                .collect(),
        }
    }

    pub fn terms(&self) -> &BTreeMap<i128, Complex64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> Vec<i128> {
        self.terms.keys().copied().collect()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return Self::default();
        }
        Self {
            terms: self.terms.iter().map(|(&n, &a)| (n, a * c)).collect(),
        }
    }

    /// `max n - min n`, zero for at most one term.
    pub fn spread(&self) -> u128 {
        match (self.terms.keys().next(), self.terms.keys().next_back()) {
            (Some(&lo), Some(&hi)) => (hi - lo) as u128,
            _ => 0,
        }
    }

    pub fn evaluate(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&n, &a)| a * Complex64::from_polar(1.0, std::f64::consts::TAU * (n as f64) * x))
            .sum()
    }
}

/// Fourier coefficients of `|f|^2`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Autocorrelation {
    coeffs: BTreeMap<i128, Complex64>,
}

impl Autocorrelation {
    pub fn coeffs(&self) -> &BTreeMap<i128, Complex64> {
        &self.coeffs
    }

    /// `c_m`, zero when `m` is not a difference of two frequencies.
    pub fn get(&self, m: i128) -> Complex64 {
        self.coeffs.get(&m).copied().unwrap_or_default()
    }

    /// `sum |c_m|^2`.
    pub fn sum_sq(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }
}

/// Positive-lag coefficients of the autocorrelation, plus `c_0`.
fn positive_lags(f: &TrigPolynomial) -> (f64, BTreeMap<i128, Complex64>) {
    let terms: Vec<(i128, Complex64)> = f.terms.iter().map(|(&n, &a)| (n, a)).collect();
    let c0 = terms.iter().map(|(_, a)| a.norm_sqr()).sum();
    let mut lags: BTreeMap<i128, Complex64> = BTreeMap::new();
    for (i, &(n2, a2)) in terms.iter().enumerate() {
        for &(n1, a1) in &terms[i + 1..] {
            *lags.entry(n1 - n2).or_default() += a1 * a2.conj();
        }
    }
    (c0, lags)
}

pub fn autocorrelation(f: &TrigPolynomial) -> Result<Autocorrelation> {
    if f.is_empty() {
        return Err(Error::Empty("trigonometric polynomial"));
    }
    let (c0, lags) = positive_lags(f);
    let mut coeffs = BTreeMap::new();
    coeffs.insert(0, Complex64::new(c0, 0.0));
    for (m, c) in lags {
        coeffs.insert(-m, c.conj());
        coeffs.insert(m, c);
    }
    Ok(Autocorrelation { coeffs })
}

/// `||f||_2^2 = sum |a_n|^2`.
pub fn l2_norm_sq(f: &TrigPolynomial) -> f64 {
    f.terms.values().map(|a| a.norm_sqr()).sum()
}

/// `||f||_4^4 = sum_m |c_m|^2`.
pub fn l4_norm_4(f: &TrigPolynomial) -> f64 {
    let (c0, lags) = positive_lags(f);
    c0 * c0 + 2.0 * lags.values().map(|c| c.norm_sqr()).sum::<f64>()
}

/// `||f||_4^4` by sampling `|f|^4` on an equispaced grid.
///
/// `|f|^4` is a trigonometric polynomial of degree `2D` with `D` the frequency
/// spread, so the mean over any `M > 2D` equispaced points is exact up to
/// rounding. `M` is the next power of two above `2D` and the samples come from
/// one inverse FFT of the shifted coefficient vector.
pub fn l4_quadrature_oracle(f: &TrigPolynomial) -> Result<f64> {
    let Some(&base) = f.terms.keys().next() else {
        return Err(Error::Empty("trigonometric polynomial"));
    };
    let spread = f.spread();
    if spread == 0 {
        let a = f.terms.values().next().copied().unwrap_or_default();
        return Ok(a.norm_sqr() * a.norm_sqr());
    }
    let points = spread
        .checked_mul(2)
        .and_then(|x| x.checked_add(1))
        .and_then(|x| x.checked_next_power_of_two())
        .filter(|&m| m <= QUADRATURE_MAX_POINTS as u128)
        .ok_or_else(|| Error::domain("frequency spread", spread, "at most 2^25"))?
        as usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); points];
    for (&n, &a) in &f.terms {
        buf[(n - base) as usize] = a;
    }
    FftPlanner::new().plan_fft_inverse(points).process(&mut buf);
    let total: f64 = buf.iter().map(|v| v.norm_sqr() * v.norm_sqr()).sum();
    Ok(total / points as f64)
}

/// The explicit form of `||f||_4^4 <= (1 + max_{m>0} r(m)) ||f||_2^4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RudinCertificate {
    pub lhs: f64,
    pub rhs: f64,
    pub max_r: u64,
    pub holds: bool,
}

/// Certifies the L4 bound with `max_r` taken from the support of `f`.
pub fn rudin_certificate(f: &TrigPolynomial) -> Result<RudinCertificate> {
    if f.is_empty() {
        return Err(Error::Empty("trigonometric polynomial"));
    }
    let support = f.support();
    let max_r = max_run(&positive_difference_runs(&support, 1));
    bounded_certificate(f, max_r)
}

/// Same certificate against a caller-supplied upper bound for `max_{m>0} r(m)`,
/// e.g. the maximal short-interval divisor count of a window scan.
pub fn bounded_certificate(f: &TrigPolynomial, max_r: u64) -> Result<RudinCertificate> {
    if f.is_empty() {
        return Err(Error::Empty("trigonometric polynomial"));
    }
    let lhs = l4_norm_4(f);
    let l2 = l2_norm_sq(f);
    let rhs = (1.0 + max_r as f64) * l2 * l2;
    Ok(RudinCertificate {
        lhs,
        rhs,
        max_r,
        holds: lhs <= rhs * (1.0 + CERTIFICATE_RELATIVE_SLACK),
    })
}
