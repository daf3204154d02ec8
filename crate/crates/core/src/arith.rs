//! Exact integer arithmetic on values below 2^96.
//!
//! Factorization is trial division by the primes below 10^6 followed by
//! Miller-Rabin and Brent's variant of Pollard rho for whatever cofactor is
//! left. The rho stage draws its starting points from a fixed-seed ChaCha
//! stream, so a given input always yields the same factor list.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Exclusive upper bound on values accepted by [`factorize`].
pub const VALUE_LIMIT: u128 = 1 << 96;

const TRIAL_LIMIT: u32 = 1_000_000;
/// Above this divisor count the range enumeration switches to meet-in-the-middle.
const FULL_GENERATION_LIMIT: u128 = 100_000;
const RHO_SEED: u64 = 0x5351_5244_4956_0001;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = TRIAL_LIMIT as usize;
        let mut composite = vec![false; limit];
        let mut primes = Vec::with_capacity(80_000);
        for i in 2..limit {
            if composite[i] {
                continue;
            }
            primes.push(i as u32);
            let mut j = i * i;
            while j < limit {
                composite[j] = true;
                j += i;
            }
        }
        primes
    })
}

/// A positive integer written as a product of prime powers.
///
/// Primes are strictly increasing and every exponent is at least one; the
/// unit has no factors. The represented value is not stored because an lcm of
/// many inputs can exceed 128 bits; use [`Factorization::value`] or
/// [`Factorization::to_biguint`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Factorization {
    factors: Vec<(u128, u32)>,
}

impl Factorization {
    /// The factorization of 1.
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds a factorization from `(prime, exponent)` pairs.
    ///
    /// The pairs must have strictly increasing bases and positive exponents.
    /// Primality of the bases is the caller's responsibility.
    pub fn from_factors(factors: Vec<(u128, u32)>) -> Result<Self> {
        for (i, &(p, e)) in factors.iter().enumerate() {
            if p < 2 {
                return Err(Error::domain("prime", p, "at least 2"));
            }
            if e == 0 {
                return Err(Error::domain("exponent", e, "at least 1"));
            }
            if i > 0 && factors[i - 1].0 >= p {
                return Err(Error::NotIncreasing { index: i });
            }
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[(u128, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Exponent of `p` (zero when `p` does not divide the value).
    pub fn exponent_of(&self, p: u128) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// The represented value, or `None` if it does not fit in 128 bits.
    pub fn value(&self) -> Option<u128> {
        self.factors.iter().try_fold(1u128, |acc, &(p, e)| {
            let pe = p.checked_pow(e)?;
            acc.checked_mul(pe)
        })
    }

    pub fn to_biguint(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::from(1u32), |acc, &(p, e)| {
                acc * BigUint::from(p).pow(e)
            })
    }

    /// Number of positive divisors, saturating at `u128::MAX`.
    pub fn divisor_count(&self) -> u128 {
        self.factors
            .iter()
            .fold(1u128, |acc, &(_, e)| acc.saturating_mul(u128::from(e) + 1))
    }

    /// True when this value divides `other`.
    pub fn divides(&self, other: &Factorization) -> bool {
        self.factors.iter().all(|&(p, e)| other.exponent_of(p) >= e)
    }

    /// All divisors `d` with `range.lo <= d <= range.hi`, ascending.
    pub fn divisors_in(&self, range: DivisorRange) -> Vec<u128> {
        let mut out = if self.divisor_count() <= FULL_GENERATION_LIMIT {
            let mut all = generate_capped(&self.factors, range.hi);
            all.retain(|&d| d >= range.lo);
            all
        } else {
            self.divisors_meet_in_middle(range)
        };
        out.sort_unstable();
        out
    }

    fn divisors_meet_in_middle(&self, range: DivisorRange) -> Vec<u128> {
        // Split the prime list so both halves generate about sqrt(tau) divisors.
        let total = (self.divisor_count() as f64).sqrt();
        let mut split = 0;
        let mut left_count = 1f64;
        while split < self.factors.len() && left_count < total {
            left_count *= f64::from(self.factors[split].1 + 1);
            split += 1;
        }
        let left = generate_capped(&self.factors[..split], range.hi);
        let mut right = generate_capped(&self.factors[split..], range.hi);
        right.sort_unstable();
        let mut out = Vec::new();
        for a in left {
            let b_lo = range.lo.div_ceil(a);
            let b_hi = range.hi / a;
            if b_lo > b_hi {
                continue;
            }
            let start = right.partition_point(|&b| b < b_lo);
            let end = right.partition_point(|&b| b <= b_hi);
            out.extend(right[start..end].iter().map(|&b| a * b));
        }
        out
    }
}

/// Every divisor built from `factors` that does not exceed `cap`, unordered.
fn generate_capped(factors: &[(u128, u32)], cap: u128) -> Vec<u128> {
    let mut divisors = vec![1u128];
    if cap == 0 {
        return Vec::new();
    }
    for &(p, e) in factors {
        let mut next = Vec::with_capacity(divisors.len() * (e as usize + 1));
        for &d in &divisors {
            let mut x = d;
            next.push(x);
            for _ in 0..e {
                match x.checked_mul(p) {
                    Some(y) if y <= cap => {
                        x = y;
                        next.push(x);
                    }
                    _ => break,
                }
            }
        }
        divisors = next;
    }
    divisors
}

/// A closed interval `[lo, hi]` of positive integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DivisorRange {
    pub lo: u128,
    pub hi: u128,
}

impl DivisorRange {
    pub fn new(lo: u128, hi: u128) -> Result<Self> {
        if lo == 0 {
            return Err(Error::domain("range.lo", lo, "a positive integer"));
        }
        if lo > hi {
            return Err(Error::domain("range.hi", hi, "at least range.lo"));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, d: u128) -> bool {
        self.lo <= d && d <= self.hi
    }

    /// Number of integers in the range.
    pub fn len(&self) -> u128 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn check_value(n: u128) -> Result<()> {
    if n == 0 || n >= VALUE_LIMIT {
        return Err(Error::domain("n", n, "1 <= n < 2^96"));
    }
    Ok(())
}

/// Factors `n` into primes. Requires `1 <= n < 2^96`.
pub fn factorize(n: u128) -> Result<Factorization> {
    check_value(n)?;
    let primes = small_primes();
    let mut factors = Vec::new();
    let mut rest = n;
    let mut idx = 0;

    // While the cofactor exceeds 64 bits no prime below 10^6 can exceed its root.
    while idx < primes.len() && rest > u128::from(u64::MAX) {
        let p = u128::from(primes[idx]);
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        idx += 1;
    }

    let mut trial_exhausted = idx == primes.len();
    if !trial_exhausted {
        let mut r = rest as u64;
        loop {
            if idx == primes.len() {
                trial_exhausted = true;
                break;
            }
            let p = u64::from(primes[idx]);
            if p * p > r {
                break;
            }
            if r.is_multiple_of(p) {
                let mut e = 0;
                while r.is_multiple_of(p) {
                    r /= p;
                    e += 1;
                }
                factors.push((u128::from(p), e));
            }
            idx += 1;
        }
        rest = u128::from(r);
    }

    if rest > 1 {
        let trial_sq = u128::from(TRIAL_LIMIT) * u128::from(TRIAL_LIMIT);
        if !trial_exhausted || rest < trial_sq {
            factors.push((rest, 1));
        } else {
            let mut big = Vec::new();
            let mut rng = ChaCha8Rng::seed_from_u64(RHO_SEED);
            split_cofactor(rest, &mut rng, &mut big);
            big.sort_unstable();
            for p in big {
                match factors.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => factors.push((p, 1)),
                }
            }
        }
    }
    Ok(Factorization { factors })
}

/// Pushes the prime factors (with multiplicity) of a cofactor free of small primes.
fn split_cofactor(n: u128, rng: &mut ChaCha8Rng, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_probable_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n, rng);
    split_cofactor(d, rng, out);
    split_cofactor(n / d, rng, out);
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= 1 << 64 {
        return (a % m) * (b % m) % m;
    }
    debug_assert!(m < VALUE_LIMIT);
    // Horner over 32-bit limbs of b; every intermediate stays below 2^128.
    let a = a % m;
    let b = b % m;
    let mut acc = 0u128;
    for shift in [64u32, 32, 0] {
        let limb = (b >> shift) & 0xffff_ffff;
        acc = (acc << 32) % m;
        acc = (acc + a * limb % m) % m;
    }
    acc
}

fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

const MR_BASES: [u128; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];
/// The first thirteen prime bases decide primality for every n below this bound.
const MR_DETERMINISTIC_BOUND: u128 = 3_317_044_064_679_887_385_961_981;

fn is_probable_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let bases = if n < MR_DETERMINISTIC_BOUND {
        &MR_BASES[..13]
    } else {
        &MR_BASES[..]
    };
    'witness: for &a in bases {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality test for `n < 2^96`: exact below 3.3 * 10^24, probabilistic
/// with 25 fixed bases above.
pub fn is_prime(n: u128) -> bool {
    if n < u128::from(TRIAL_LIMIT) {
        return n >= 2 && small_primes().binary_search(&(n as u32)).is_ok();
    }
    n < VALUE_LIMIT && is_probable_prime(n)
}

/// Finds a nontrivial factor of the odd composite `n` (Brent, batched gcds).
fn pollard_brent(n: u128, rng: &mut ChaCha8Rng) -> u128 {
    if n.is_multiple_of(2) {
        return 2;
    }
    const BATCH: u64 = 128;
    loop {
        let c = rng.random_range(1..n);
        let step = |v: u128| (mul_mod(v, v, n) + c) % n;
        let mut y = rng.random_range(1..n);
        let mut x = y;
        let mut ys = y;
        let mut g = 1u128;
        let mut q = 1u128;
        let mut r = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = step(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = step(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
}

/// The divisors `d` of `n` with `range.lo <= d <= range.hi`, ascending.
pub fn divisors_in_range(n: u128, range: DivisorRange) -> Result<Vec<u128>> {
    Ok(factorize(n)?.divisors_in(range))
}

pub fn gcd_pair(a: u128, b: u128) -> u128 {
    a.gcd(&b)
}

/// Least common multiple of factored values; exponents are per-prime maxima.
pub fn lcm_factored(values: &[Factorization]) -> Result<Factorization> {
    if values.is_empty() {
        return Err(Error::Empty("lcm input"));
    }
    let mut exps: BTreeMap<u128, u32> = BTreeMap::new();
    for v in values {
        for &(p, e) in v.factors() {
            let slot = exps.entry(p).or_insert(0);
            *slot = (*slot).max(e);
        }
    }
    Ok(Factorization {
        factors: exps.into_iter().collect(),
    })
}

/// Largest `t` with `t^3 <= n`.
pub fn icbrt(n: u128) -> u128 {
    let mut t = (n as f64).cbrt() as u128;
    let cube = |t: u128| t.checked_pow(3);
    while cube(t).is_none_or(|c| c > n) {
        t -= 1;
    }
    while cube(t + 1).is_some_and(|c| c <= n) {
        t += 1;
    }
    t
}
