//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails or exceeds its time budget.
//!
//! Run with `cargo test -p sqdiv-core --test acceptance`.

// `ensure!` negates float comparisons on purpose so that NaN fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqdiv_core::exponent::{beta, continuous_argmax, gamma0, gamma1};
use sqdiv_core::spectral::bounded_certificate;
use sqdiv_core::window::{cube_window, square_window, summarize_scan, window_sieve};
use sqdiv_core::*;

const SEED: u64 = 0x5eed_2024;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Largest `k` with `k^q <= n^p`, exactly.
fn floor_pow(n: u128, p: u32, q: u32) -> u128 {
    let target = BigUint::from(n).pow(p);
    let mut k = (n as f64).powf(f64::from(p) / f64::from(q)).floor() as u128;
    while k > 0 && BigUint::from(k).pow(q) > target {
        k -= 1;
    }
    while BigUint::from(k + 1).pow(q) <= target {
        k += 1;
    }
    k
}

fn growth_probe() -> Outcome {
    let mut ratios = Vec::new();
    for n in [512u128, 1024, 2048, 4096] {
        let set = FrequencySet::powers(Power::Square, 1, n).map_err(|e| e.to_string())?;
        let e = additive_energy(&set);
        let nf = n as f64;
        ratios.push((n, e, e as f64 / (nf * nf * nf.ln())));
    }
    let mut detail = Vec::new();
    for &(n, e, ratio) in &ratios {
        detail.push(format!("N={n} E={e} E/(N^2 ln N)={ratio:.4}"));
        ensure!(
            (0.3..=3.0).contains(&ratio),
            "N={n}: ratio {ratio} outside [0.3, 3.0]"
        );
    }
    for w in ratios.windows(2) {
        let step = w[1].2 / w[0].2;
        ensure!(
            (0.8..=1.25).contains(&step),
            "ratio step {step} outside [0.8, 1.25] at N={}",
            w[1].0
        );
    }
    Ok(detail.join("; "))
}

fn sidon_windows() -> Outcome {
    let sq = verify_window_range(Power::Square, 1, 2000, 4).map_err(|e| e.to_string())?;
    ensure!(
        sq.checked == 2000 && sq.failures.is_empty(),
        "square failures: {:?}",
        sq.failures
    );
    let cu = verify_window_range(Power::Cube, 1, 100_000, 4).map_err(|e| e.to_string())?;
    ensure!(
        cu.checked == 100_000 && cu.failures.is_empty(),
        "cube failures: {:?}",
        cu.failures
    );
    Ok(format!(
        "square checked={} failures=0; cube checked={} failures=0",
        sq.checked, cu.checked
    ))
}

/// Global big-integer form of the lcm bound, independent of the per-prime ledger.
fn lcm_global_oracle(d: &[u128], s: usize) -> bool {
    let r = d.len();
    let c = (r - s + 1) as u32;
    let b: u32 = num_integer::binomial(r as u32, s as u32);
    let mut lcm_prod = BigUint::from(1u32);
    for mask in 0u32..(1 << r) {
        if mask.count_ones() as usize == s {
            let fs: Vec<_> = (0..r)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| factorize(d[i]).unwrap())
                .collect();
            lcm_prod *= lcm_factored(&fs).unwrap().to_biguint();
        }
    }
    let mut gcd_prod = BigUint::from(1u32);
    let mut d_prod = BigUint::from(1u32);
    for i in 0..r {
        d_prod *= BigUint::from(d[i]);
        for j in i + 1..r {
            gcd_prod *= BigUint::from(gcd_pair(d[i], d[j]));
        }
    }
    lcm_prod.pow(c * (c + 1)) * gcd_prod.pow(2 * b) >= d_prod.pow(2 * b * c)
}

fn lemma_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut certificates = 0;
    let mut cross_checked = 0;
    for _ in 0..1000 {
        let r = rng.random_range(2..=7usize);
        let d: Vec<u128> = (0..r)
            .map(|_| rng.random_range(1..=1_000_000u128))
            .collect();
        for s in 2..=r {
            let cert = verify_lemma32(&d, s).map_err(|e| e.to_string())?;
            ensure!(cert.holds, "random instance failed:\n{cert}");
            certificates += 1;
            if r <= 4 {
                ensure!(
                    lcm_global_oracle(&d, s),
                    "global oracle disagrees for d={d:?} s={s}"
                );
                cross_checked += 1;
            }
        }
    }

    let mut sharp = 0;
    for r in 2..=8 {
        for s in 2..=r {
            for d in [2u128, 6, 360] {
                let mut v = vec![1u128; s - 1];
                v.extend(std::iter::repeat_n(d, r - s + 1));
                let cert = verify_lemma32(&v, s).map_err(|e| e.to_string())?;
                ensure!(
                    cert.holds && cert.equality,
                    "sharp case r={r} s={s} d={d} not tight:\n{cert}"
                );
                sharp += 1;
            }
        }
    }

    let primes = [2u128, 3, 5, 7, 11];
    let mut triples = Vec::new();
    for a in 0..5 {
        for b in a + 1..5 {
            for c in b + 1..5 {
                triples.push(primes[a] * primes[b] * primes[c]);
            }
        }
    }
    let cert = verify_lemma32(&triples, 5).map_err(|e| e.to_string())?;
    ensure!(
        cert.holds && cert.equality,
        "triple-product instance not tight:\n{cert}"
    );

    for r in 2..=6 {
        for d in 2..=10u128 {
            let cert = counterexample_s1(r, d).map_err(|e| e.to_string())?;
            ensure!(
                !cert.holds,
                "s = 1 counterexample r={r} d={d} unexpectedly holds"
            );
        }
    }
    Ok(format!(
        "{certificates} random certificates hold ({cross_checked} cross-checked globally); \
         {sharp} sharp cases tight; r=10 s=5 tight; 45 s=1 cases fail"
    ))
}

fn certificate_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x4);
    let mut worst_quad = 0f64;
    let mut worst_ratio = 0f64;
    for i in 0..500 {
        let n: u128 = if i < 5 {
            10_000
        } else {
            // log-uniform over [1, 10^4]
            (10f64.powf(rng.random_range(0.0..4.0)).round() as u128).clamp(1, 10_000)
        };
        let k_max = floor_pow(n, 3, 5).clamp(1, n);
        let k = if i < 5 {
            k_max
        } else {
            rng.random_range(1..=k_max)
        };
        let mut terms = Vec::new();
        for s in 0..=k {
            if terms.is_empty() && s == k || rng.random_bool(0.8) {
                let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                terms.push((((n + s) * (n + s)) as i128, a));
            }
        }
        let f = TrigPolynomial::new(terms).map_err(|e| e.to_string())?;
        if f.is_empty() {
            continue;
        }
        let cert = rudin_certificate(&f).map_err(|e| e.to_string())?;
        ensure!(cert.holds, "N={n} k={k}: {} > {}", cert.lhs, cert.rhs);
        worst_ratio = worst_ratio.max(cert.lhs / cert.rhs);

        let scan = square_window_scan(n, k, 1).map_err(|e| e.to_string())?;
        ensure!(
            scan.max_tau >= cert.max_r,
            "N={n} k={k}: max_r {} exceeds max_tau {}",
            cert.max_r,
            scan.max_tau
        );
        let divisor_cert = bounded_certificate(&f, scan.max_tau).map_err(|e| e.to_string())?;
        ensure!(
            divisor_cert.holds,
            "N={n} k={k}: divisor-window certificate fails"
        );

        let quad = l4_quadrature_oracle(&f).map_err(|e| e.to_string())?;
        let diff = rel_diff(cert.lhs, quad);
        ensure!(
            diff < 1e-6,
            "N={n} k={k}: l4 {} vs quadrature {quad} (rel {diff:e})",
            cert.lhs
        );
        worst_quad = worst_quad.max(diff);
    }
    Ok(format!(
        "500 polynomials; max lhs/rhs = {worst_ratio:.4}; max quadrature rel diff = {worst_quad:.2e}"
    ))
}

fn scan_oracle_equivalence() -> Outcome {
    let mut cases = 0;
    let mut touched_total = 0u64;
    for n in 1..=200u128 {
        let k_max = floor_pow(n, 7, 10).min(n);
        for k in 1..=k_max {
            let (window, m_limit) = square_window(n, k).map_err(|e| e.to_string())?;
            let counts = window_sieve(window, m_limit, 1);
            let report = summarize_scan(Power::Square, n, k, window, m_limit, &counts)
                .map_err(|e| e.to_string())?;
            ensure!(
                report.touched() == counts.len() as u64,
                "histogram total mismatch N={n} k={k}"
            );
            let set = FrequencySet::powers(Power::Square, n, n + k).map_err(|e| e.to_string())?;
            let reps: BTreeMap<i128, u64> = representation_counts(&set);
            for (&m, &c) in &counts {
                let tau = tau_interval(m, window).map_err(|e| e.to_string())?;
                ensure!(tau == c, "N={n} k={k} m={m}: sieve {c} vs tau {tau}");
                let found = square_representations(m, n, k)
                    .map_err(|e| e.to_string())?
                    .len() as u64;
                let brute = reps.get(&(m as i128)).copied().unwrap_or(0);
                ensure!(
                    found == brute,
                    "N={n} k={k} m={m}: recovered {found} vs pairs {brute}"
                );
                ensure!(
                    found <= tau,
                    "N={n} k={k} m={m}: {found} representations > tau {tau}"
                );
            }
            for (&m, _) in reps.range(1..) {
                ensure!(
                    counts.contains_key(&(m as u128)),
                    "N={n} k={k}: difference {m} not touched by sieve"
                );
            }
            cases += 1;
            touched_total += counts.len() as u64;
        }
    }

    let mut cube_cases = 0;
    for n in 1..=60u128 {
        for k in 1..=5u128.min(n) {
            let (window, m_limit) = cube_window(n, k).map_err(|e| e.to_string())?;
            let counts = window_sieve(window, m_limit, 1);
            for (&m, &c) in &counts {
                let tau = tau_interval(m, window).map_err(|e| e.to_string())?;
                ensure!(tau == c, "cube N={n} k={k} m={m}: sieve {c} vs tau {tau}");
            }
            let set = FrequencySet::powers(Power::Cube, n, n + k).map_err(|e| e.to_string())?;
            for (&m, &r) in representation_counts(&set).range(1..) {
                let m = m as u128;
                ensure!(
                    m <= m_limit,
                    "cube N={n} k={k}: difference {m} beyond 7N^2k"
                );
                let tau = counts.get(&m).copied().unwrap_or(0);
                ensure!(r <= tau, "cube N={n} k={k} m={m}: r = {r} > tau = {tau}");
            }
            cube_cases += 1;
        }
    }
    Ok(format!(
        "{cases} square (N, k) cases, {touched_total} touched m; {cube_cases} cube cases"
    ))
}

fn exponent_limits() -> Outcome {
    let s3 = square_exponent(3).map_err(|e| e.to_string())?;
    ensure!(s3.gamma_r == Ratio::new(1, 2), "square r=3: {}", s3.gamma_r);
    let s5 = square_exponent(5).map_err(|e| e.to_string())?;
    ensure!(
        s5.gamma_r == Ratio::new(9, 16),
        "square r=5: {}",
        s5.gamma_r
    );
    let s1000 = square_exponent(1000).map_err(|e| e.to_string())?;
    ensure!(
        (s1000.gamma_r_float - gamma0()).abs() < 0.01,
        "square r=1000: {}",
        s1000.gamma_r_float
    );
    let c3 = cube_exponent(3).map_err(|e| e.to_string())?;
    ensure!(c3.gamma_r == Ratio::new(1, 2), "cube r=3: {}", c3.gamma_r);
    let c1000 = cube_exponent(1000).map_err(|e| e.to_string())?;
    ensure!(
        (c1000.gamma_r_float - gamma1()).abs() < 0.01,
        "cube r=1000: {}",
        c1000.gamma_r_float
    );
    let g0 = gamma0();
    let fp0 = continuous_objective(Power::Square, g0).map_err(|e| e.to_string())?;
    ensure!((fp0 - g0).abs() < 1e-12, "square fixed point {fp0} vs {g0}");
    let fp1 = continuous_objective(Power::Cube, beta()).map_err(|e| e.to_string())?;
    ensure!(
        (fp1 - gamma1()).abs() < 1e-12,
        "cube value at beta {fp1} vs {}",
        gamma1()
    );
    let a0 = continuous_argmax(Power::Square);
    ensure!((a0 - g0).abs() < 1e-12, "square argmax {a0}");
    Ok(format!(
        "1/2, 9/16, {:.6}, 1/2, {:.6}; fixed points within 1e-12",
        s1000.gamma_r_float, c1000.gamma_r_float
    ))
}

fn desk_scale_probe() -> Outcome {
    let n = 100_000u128;
    let k = floor_pow(n, 11, 20);
    let start = Instant::now();
    let report = square_window_scan(n, k, 4).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(elapsed <= Duration::from_secs(60), "scan took {elapsed:?}");

    let m = report.argmax_m.ok_or("no touched m")?;
    let tau = tau_interval(m, report.window).map_err(|e| e.to_string())?;
    ensure!(
        tau == report.max_tau,
        "argmax m={m}: tau {tau} vs max_tau {}",
        report.max_tau
    );

    let counts = window_sieve(report.window, report.m_limit, 4);
    ensure!(
        counts.len() as u64 == report.touched(),
        "touched count mismatch"
    );
    let keys: Vec<u128> = counts.keys().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x7);
    for _ in 0..100 {
        let m = keys[rng.random_range(0..keys.len())];
        let tau = tau_interval(m, report.window).map_err(|e| e.to_string())?;
        ensure!(
            tau == counts[&m],
            "m={m}: tau {tau} vs sieve {}",
            counts[&m]
        );
    }
    let again = square_window_scan(n, k, 4).map_err(|e| e.to_string())?;
    let single = square_window_scan(n, k, 1).map_err(|e| e.to_string())?;
    ensure!(
        again == report && single == report,
        "scan is not deterministic across runs/workers"
    );

    let histogram: Vec<String> = report
        .histogram
        .iter()
        .map(|(t, c)| format!("{t}:{c}"))
        .collect();
    Ok(format!(
        "N={n} k={k} window=[{}, {}] m_limit={} max_tau={} argmax_m={m} in {:.2?}; histogram {{{}}}",
        report.window.lo,
        report.window.hi,
        report.m_limit,
        report.max_tau,
        elapsed,
        histogram.join(", ")
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 energy growth of squares", 120, growth_probe),
        ("2 Sidon windows", 180, sidon_windows),
        ("3 lcm bound suite", 30, lemma_suite),
        ("4 L4 certificates and quadrature", 120, certificate_suite),
        ("5 scan/oracle equivalence", 180, scan_oracle_equivalence),
        ("6 exponent limits", 10, exponent_limits),
        ("7 desk-scale window scan", 60, desk_scale_probe),
    ];
    let mut failed = Vec::new();
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed > Duration::from_secs(budget) {
                Err(format!(
                    "exceeded {budget}s budget ({elapsed:.2?}); {detail}"
                ))
            } else {
                Ok(detail)
            }
        });
        match outcome {
            Ok(detail) => println!("[PASS] criterion {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                println!("[FAIL] criterion {name} ({elapsed:.2?}): {why}");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
