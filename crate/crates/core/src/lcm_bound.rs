//! Per-prime certificates for the averaged lcm lower bound
//!
//! ```text
//! (prod_{i1<..<is} [d_i1, .., d_is])^(1/C(r,s))
//!     >= prod d_i^(2/(c+1)) / prod_{i<j} (d_i, d_j)^(2/(c(c+1))),   c = r - s + 1.
//! ```
//!
//! Taking `p`-adic valuations with the exponents of `p` sorted as
//! `b_1 <= .. <= b_r`, the bound becomes, after clearing denominators by
//! `C(r,s) c (c+1)`,
//!
//! ```text
//! c(c+1) * sum_{j>=s} C(j-1, s-1) b_j + 2 C(r,s) * sum_{i<r} (r-i) b_i
//!     >= 2 C(r,s) c * sum_i b_i
//! ```
//!
//! which is checked exactly for every prime dividing some `d_i`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{factorize, Factorization};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcmBoundInstance {
    pub d: Vec<u128>,
    pub r: usize,
    pub s: usize,
    /// `r - s + 1`.
    pub c: usize,
    /// `C(r, s)`.
    pub binom: BigUint,
}

/// One ledger row: the cleared inequality restricted to the prime `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeRow {
    pub p: u128,
    /// Exponents of `p` in the `d_i`, nondecreasing.
    pub betas: Vec<u32>,
    pub lhs: BigUint,
    pub rhs: BigUint,
}

impl PrimeRow {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcmBoundCertificate {
    pub instance: LcmBoundInstance,
    /// Rows in increasing prime order.
    pub per_prime: Vec<PrimeRow>,
    pub holds: bool,
    pub equality: bool,
}

impl LcmBoundCertificate {
    /// True when no prime divides any `d_i`, so both sides are 1.
    pub fn vacuous(&self) -> bool {
        self.per_prime.is_empty()
    }
}

impl fmt::Display for LcmBoundCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inst = &self.instance;
        writeln!(
            f,
            "r={} s={} c={} C(r,s)={} holds={} equality={}",
            inst.r, inst.s, inst.c, inst.binom, self.holds, self.equality
        )?;
        for row in &self.per_prime {
            let betas: Vec<String> = row.betas.iter().map(u32::to_string).collect();
            writeln!(
                f,
                "p={} beta=[{}] lhs={} rhs={} {}",
                row.p,
                betas.join(","),
                row.lhs,
                row.rhs,
                if row.holds() { "ok" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

fn binom_big(n: usize, k: usize) -> BigUint {
    if k > n {
        BigUint::zero()
    } else {
        binomial(BigUint::from(n), BigUint::from(k))
    }
}

/// Builds the certificate with no restriction on `s` beyond `1 <= s <= r`.
fn certify(d: &[u128], s: usize) -> Result<LcmBoundCertificate> {
    let r = d.len();
    let factored: Vec<Factorization> = d.iter().map(|&x| factorize(x)).collect::<Result<_>>()?;
    let primes: BTreeSet<u128> = factored
        .iter()
        .flat_map(|f| f.factors().iter().map(|&(p, _)| p))
        .collect();

    let c = r - s + 1;
    let binom = binom_big(r, s);
    // weight of b_j in the exponent of the product of s-wise lcms
    let lcm_weights: Vec<BigUint> = (1..=r).map(|j| binom_big(j - 1, s - 1)).collect();
    let lhs_lcm_scale = BigUint::from(c * (c + 1));
    let lhs_gcd_scale = BigUint::from(2u32) * &binom;
    let rhs_scale = BigUint::from(2 * c) * &binom;

    let mut per_prime = Vec::with_capacity(primes.len());
    for p in primes {
        let mut betas: Vec<u32> = factored.iter().map(|f| f.exponent_of(p)).collect();
        betas.sort_unstable();
        let e_lcm: BigUint = betas.iter().zip(&lcm_weights).map(|(&b, w)| w * b).sum();
        let e_gcd: u128 = betas
            .iter()
            .enumerate()
            .map(|(i, &b)| (r - 1 - i) as u128 * u128::from(b))
            .sum();
        let e_d: u128 = betas.iter().map(|&b| u128::from(b)).sum();
        let lhs = &lhs_lcm_scale * e_lcm + &lhs_gcd_scale * e_gcd;
        let rhs = &rhs_scale * e_d;
        per_prime.push(PrimeRow { p, betas, lhs, rhs });
    }
    let holds = per_prime.iter().all(PrimeRow::holds);
    let equality = per_prime.iter().all(|row| row.lhs == row.rhs);
    Ok(LcmBoundCertificate {
        instance: LcmBoundInstance {
            d: d.to_vec(),
            r,
            s,
            c,
            binom,
        },
        per_prime,
        holds,
        equality,
    })
}

/// Certifies the bound for `d_1, .., d_r` and `2 <= s <= r`.
///
/// The bound is a theorem, so `holds == false` on valid input means a bug.
pub fn verify_lemma32(d: &[u128], s: usize) -> Result<LcmBoundCertificate> {
    if d.len() < 2 {
        return Err(Error::domain("r", d.len(), "at least 2"));
    }
    if s < 2 || s > d.len() {
        return Err(Error::domain("s", s, "2 <= s <= r"));
    }
    certify(d, s)
}

/// The `s = 1` form on `(1, .., 1, d)`, which fails for every `r >= 2`, `d >= 2`.
///
/// With `d = 1` the certificate is vacuous (no primes) and reports `holds`.
pub fn counterexample_s1(r: usize, d: u128) -> Result<LcmBoundCertificate> {
    if r < 2 {
        return Err(Error::domain("r", r, "at least 2"));
    }
    let mut values = vec![1u128; r];
    values[r - 1] = d;
    certify(&values, 1)
}

/// Exact factorial comparison `r! (l-s+2)! >= l! (r-s+2)!`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ineq32 {
    pub lhs: BigUint,
    pub rhs: BigUint,
    pub holds: bool,
}

fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Partial-sum comparison of the weights `delta_i` and `gamma_i` for `i <= l`,
/// in its cleared factorial form. Requires `2 <= s <= l <= r`.
pub fn verify_ineq_32(r: usize, s: usize, l: usize) -> Result<Ineq32> {
    if s < 2 || s > l || l > r {
        return Err(Error::domain(
            "(r, s, l)",
            format!("({r}, {s}, {l})"),
            "2 <= s <= l <= r",
        ));
    }
    let lhs = factorial(r) * factorial(l - s + 2);
    let rhs = factorial(l) * factorial(r - s + 2);
    let holds = lhs >= rhs;
    Ok(Ineq32 { lhs, rhs, holds })
}

/// Checks `sum_{j=s}^{r} C(j-1, s-1) = C(r, s)` exactly. Requires `1 <= s <= r`.
pub fn binomial_colsum_check(r: usize, s: usize) -> Result<bool> {
    if s < 1 || s > r {
        return Err(Error::domain(
            "(r, s)",
            format!("({r}, {s})"),
            "1 <= s <= r",
        ));
    }
    let sum: BigUint = (s..=r).map(|j| binom_big(j - 1, s - 1)).sum();
    Ok(sum == binom_big(r, s))
}

/// The rational weights of the sorted exponents `b_s, .., b_r` on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaWeights {
    /// `gamma_i = C(i-1, s-1) / C(r, s)` for `i = s..=r`.
    pub gamma: Vec<BigRational>,
    /// `delta_i = 2 (i - s + 1) / (c (c + 1))` for `i = s..=r`.
    pub delta: Vec<BigRational>,
}

pub fn lemma_weights(r: usize, s: usize) -> Result<LemmaWeights> {
    if s < 2 || s > r {
        return Err(Error::domain("s", s, "2 <= s <= r"));
    }
    let c = r - s + 1;
    let b = binom_big(r, s);
    let gamma = (s..=r)
        .map(|i| BigRational::new(binom_big(i - 1, s - 1).into(), b.clone().into()))
        .collect();
    let delta = (s..=r)
        .map(|i| BigRational::new((2 * (i - s + 1)).into(), (c * (c + 1)).into()))
        .collect();
    Ok(LemmaWeights { gamma, delta })
}
