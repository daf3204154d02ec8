//! Command layer for the `sqdiv` binary: argument types, command dispatch and
//! CSV/JSON rendering.

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqdiv_core::exponent::{best_exponent, exponent_table, format_ratio, k_threshold_report};
use sqdiv_core::spectral::max_positive_representation;
use sqdiv_core::{
    additive_energy, counterexample_s1, cube_window_scan, rudin_certificate, ruzsa_scan,
    square_window_scan, verify_lemma32, verify_window_range, FrequencySet, LcmBoundCertificate,
    Power, TrigPolynomial, WindowScanReport,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] sqdiv_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Squares,
    Cubes,
}

impl From<Kind> for Power {
    fn from(kind: Kind) -> Power {
        match kind {
            Kind::Squares => Power::Square,
            Kind::Cubes => Power::Cube,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PowerArg {
    Square,
    Cube,
}

impl From<PowerArg> for Power {
    fn from(p: PowerArg) -> Power {
        match p {
            PowerArg::Square => Power::Square,
            PowerArg::Cube => Power::Cube,
        }
    }
}

/// Additive-energy and divisor-window experiments on squares and cubes.
///
/// Exit status: 0 on success, 1 when a checked inequality or invariant fails,
/// 2 on invalid arguments.
#[derive(Debug, Parser)]
#[command(name = "sqdiv", version)]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for the parallel kernels.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Energy and L4 certificate of {n^2 : n <= N}, or of {(N+s)^2 : 0 <= s <= k} with --k.
    ///
    /// Columns: support, n, k, size, energy, trivial_energy, max_r,
    /// energy_over_n2_log_n, cert_lhs, cert_rhs, cert_holds.
    Energy {
        #[arg(long)]
        n: u128,
        #[arg(long)]
        k: Option<u128>,
    },
    /// Divisor counts of m <= 3Nk in [2N, 2N + 2k], one row per histogram bucket.
    ///
    /// Columns: n, k, m_limit, window_lo, window_hi, max_tau, argmax_m, tau, count.
    ScanSquares {
        #[arg(long)]
        n: u128,
        #[arg(long)]
        k: u128,
    },
    /// Divisor counts of m <= 7N^2 k in [3N^2, 3N^2 + 9Nk], one row per histogram bucket.
    ///
    /// Columns: n, k, m_limit, window_lo, window_hi, max_tau, argmax_m, tau, count.
    ScanCubes {
        #[arg(long)]
        n: u128,
        #[arg(long)]
        k: u128,
    },
    /// Divisors of n in [sqrt(n), sqrt(n) + n^(1/2 - eps)] for n in [from, to].
    ///
    /// Columns: n, lo, hi, count, running_max.
    Ruzsa {
        #[arg(long)]
        from: u128,
        #[arg(long)]
        to: u128,
        #[arg(long)]
        eps: f64,
    },
    /// Per-prime check of the lcm product bound.
    ///
    /// Give the d_i explicitly with --s, or use --count for seeded random
    /// instances (r in [2, 7], d_i in [1, 10^6], s in [2, r] unless fixed).
    /// `--s 1 --r R D` builds the failing instance (1, ..., 1, D).
    ///
    /// Columns: instance, r, s, d, p, betas, lhs_int, rhs_int, row_holds, holds, equality.
    Lemma32 {
        /// The d_i, positive integers below 2^96.
        d: Vec<u128>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Sidon check of the square or cube window for every N in [from, to].
    ///
    /// Columns: kind, from, to, checked, failures, failing_n.
    Sidon {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        from: u128,
        #[arg(long)]
        to: u128,
    },
    /// Optimal exponent gamma_r for one r or a range of r.
    ///
    /// Columns: r, best_c, gamma_r, gamma_r_float, and n, k_star with --n.
    Exponent {
        #[arg(long, value_enum)]
        power: PowerArg,
        #[arg(long, conflicts_with_all = ["from", "to"])]
        r: Option<u64>,
        #[arg(long, requires = "to")]
        from: Option<u64>,
        #[arg(long, requires = "from")]
        to: Option<u64>,
        #[arg(long)]
        n: Option<u128>,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub workers: usize,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        RunConfig {
            command: cli.command,
            seed: cli.seed,
            format: cli.format,
            out: cli.out,
            workers: cli.workers,
        }
    }
}

/// Rendered table plus whether every checked property held.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub bytes: Vec<u8>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u128),
    /// Decimal digits of an arbitrary-size integer.
    Big(String),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Big(v) | Cell::Text(v) => f.write_str(v),
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Bool(v) => write!(f, "{v}"),
            Cell::Empty => Ok(()),
        }
    }
}

impl Cell {
    fn to_json(&self) -> Result<serde_json::Value, CliError> {
        use serde_json::Value;
        Ok(match self {
            Cell::Int(_) | Cell::Big(_) => serde_json::from_str(&self.to_string())?,
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(v) => Value::String(v.clone()),
            Cell::Empty => Value::Null,
        })
    }
}

/// A table with a fixed column order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::to_string))?;
                }
                w.into_inner().map_err(|e| CliError::Io(e.into_error()))
            }
            Format::Json => {
                let mut out = Vec::with_capacity(self.rows.len());
                for row in &self.rows {
                    let mut obj = serde_json::Map::new();
                    for (name, cell) in self.columns.iter().zip(row) {
                        obj.insert((*name).to_owned(), cell.to_json()?);
                    }
                    out.push(serde_json::Value::Object(obj));
                }
                let mut bytes = serde_json::to_vec_pretty(&out)?;
                bytes.push(b'\n');
                Ok(bytes)
            }
        }
    }
}

fn joined<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Runs one command and renders its table; does not touch the filesystem.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    if config.workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let (table, ok) = match &config.command {
        Command::Energy { n, k } => energy(*n, *k, config.seed)?,
        Command::ScanSquares { n, k } => (
            scan_table(&square_window_scan(*n, *k, config.workers)?),
            true,
        ),
        Command::ScanCubes { n, k } => {
            (scan_table(&cube_window_scan(*n, *k, config.workers)?), true)
        }
        Command::Ruzsa { from, to, eps } => ruzsa(*from, *to, *eps)?,
        Command::Lemma32 { d, s, r, count } => lemma32(d, *s, *r, *count, config.seed)?,
        Command::Sidon { kind, from, to } => sidon(*kind, *from, *to, config.workers)?,
        Command::Exponent {
            power,
            r,
            from,
            to,
            n,
        } => exponent((*power).into(), *r, *from, *to, *n)?,
    };
    Ok(RunOutcome {
        bytes: table.render(config.format)?,
        ok,
    })
}

fn energy(n: u128, k: Option<u128>, seed: u64) -> Result<(Table, bool), CliError> {
    let (support, set) = match k {
        None => ("prefix", FrequencySet::powers(Power::Square, 1, n)?),
        Some(k) => (
            "window",
            FrequencySet::powers(Power::Square, n, n.saturating_add(k))?,
        ),
    };
    let size = set.len() as u64;
    let e = additive_energy(&set);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = TrigPolynomial::new(set.elements().iter().map(|&x| {
        let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        (x as i128, a)
    }))?;
    let cert = rudin_certificate(&f)?;
    let nf = n as f64;
    let normalized = if k.is_none() && n >= 2 {
        Cell::Float(e as f64 / (nf * nf * nf.ln()))
    } else {
        Cell::Empty
    };
    let mut t = Table::new(&[
        "support",
        "n",
        "k",
        "size",
        "energy",
        "trivial_energy",
        "max_r",
        "energy_over_n2_log_n",
        "cert_lhs",
        "cert_rhs",
        "cert_holds",
    ]);
    t.push(vec![
        Cell::Text(support.into()),
        Cell::Int(n),
        k.map_or(Cell::Empty, Cell::Int),
        Cell::Int(size.into()),
        Cell::Int(e.into()),
        Cell::Int((2 * size * size - size).into()),
        Cell::Int(max_positive_representation(&set).into()),
        normalized,
        Cell::Float(cert.lhs),
        Cell::Float(cert.rhs),
        Cell::Bool(cert.holds),
    ]);
    Ok((t, cert.holds))
}

fn scan_table(report: &WindowScanReport) -> Table {
    let mut t = Table::new(&[
        "n",
        "k",
        "m_limit",
        "window_lo",
        "window_hi",
        "max_tau",
        "argmax_m",
        "tau",
        "count",
    ]);
    for (&tau, &count) in &report.histogram {
        t.push(vec![
            Cell::Int(report.n),
            Cell::Int(report.k),
            Cell::Int(report.m_limit),
            Cell::Int(report.window.lo),
            Cell::Int(report.window.hi),
            Cell::Int(report.max_tau.into()),
            report.argmax_m.map_or(Cell::Empty, Cell::Int),
            Cell::Int(tau.into()),
            Cell::Int(count.into()),
        ]);
    }
    t
}

fn ruzsa(from: u128, to: u128, eps: f64) -> Result<(Table, bool), CliError> {
    let mut t = Table::new(&["n", "lo", "hi", "count", "running_max"]);
    for rec in ruzsa_scan(from, to, eps)? {
        t.push(vec![
            Cell::Int(rec.n),
            Cell::Int(rec.lo),
            Cell::Int(rec.hi),
            Cell::Int(rec.count.into()),
            Cell::Int(rec.running_max.into()),
        ]);
    }
    Ok((t, true))
}

fn lemma_rows(t: &mut Table, index: usize, cert: &LcmBoundCertificate) {
    let inst = &cert.instance;
    let head = [
        Cell::Int(index as u128),
        Cell::Int(inst.r as u128),
        Cell::Int(inst.s as u128),
        Cell::Text(joined(&inst.d)),
    ];
    let tail = [Cell::Bool(cert.holds), Cell::Bool(cert.equality)];
    if cert.vacuous() {
        let mut row = head.to_vec();
        row.extend([
            Cell::Empty,
            Cell::Empty,
            Cell::Big("1".into()),
            Cell::Big("1".into()),
            Cell::Bool(true),
        ]);
        row.extend(tail.clone());
        t.push(row);
    }
    for pr in &cert.per_prime {
        let mut row = head.to_vec();
        row.extend([
            Cell::Int(pr.p),
            Cell::Text(joined(&pr.betas)),
            Cell::Big(pr.lhs.to_string()),
            Cell::Big(pr.rhs.to_string()),
            Cell::Bool(pr.holds()),
        ]);
        row.extend(tail.clone());
        t.push(row);
    }
}

fn lemma32(
    d: &[u128],
    s: Option<usize>,
    r: Option<usize>,
    count: Option<usize>,
    seed: u64,
) -> Result<(Table, bool), CliError> {
    let mut t = Table::new(&[
        "instance",
        "r",
        "s",
        "d",
        "p",
        "betas",
        "lhs_int",
        "rhs_int",
        "row_holds",
        "holds",
        "equality",
    ]);
    let mut ok = true;
    match (count, s) {
        (Some(_), _) if !d.is_empty() => {
            return Err(CliError::Usage(
                "give either explicit d values or --count, not both".into(),
            ));
        }
        (None, Some(1)) => {
            let (r, &[dv]) = (
                r.ok_or_else(|| CliError::Usage("--s 1 needs --r and one D".into()))?,
                d,
            ) else {
                return Err(CliError::Usage("--s 1 takes exactly one D".into()));
            };
            let cert = counterexample_s1(r, dv)?;
            // the bound is expected to fail here unless the instance is trivial
            ok = !cert.holds || cert.vacuous();
            lemma_rows(&mut t, 0, &cert);
        }
        (None, Some(s)) => {
            if d.is_empty() {
                return Err(CliError::Usage("no d values given".into()));
            }
            if r.is_some_and(|r| r != d.len()) {
                return Err(CliError::Usage(format!(
                    "--r does not match the {} d values",
                    d.len()
                )));
            }
            let cert = verify_lemma32(d, s)?;
            ok = cert.holds;
            lemma_rows(&mut t, 0, &cert);
        }
        (None, None) => return Err(CliError::Usage("explicit d values need --s".into())),
        (Some(count), s) => {
            if let Some(r) = r {
                if r < 2 {
                    return Err(CliError::Usage("--r must be at least 2".into()));
                }
                if s.is_some_and(|s| s < 2 || s > r) {
                    return Err(CliError::Usage("--s must lie in [2, r]".into()));
                }
            } else if s.is_some_and(|s| !(2..=7).contains(&s)) {
                return Err(CliError::Usage(
                    "--s must lie in [2, 7] when r is random".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for index in 0..count {
                let lo = s.unwrap_or(2);
                let r = r.unwrap_or_else(|| rng.random_range(lo.max(2)..=7));
                let s = s.unwrap_or_else(|| rng.random_range(2..=r));
                let d: Vec<u128> = (0..r).map(|_| rng.random_range(1..=1_000_000)).collect();
                let cert = verify_lemma32(&d, s)?;
                ok &= cert.holds;
                lemma_rows(&mut t, index, &cert);
            }
        }
    }
    Ok((t, ok))
}

fn sidon(kind: Kind, from: u128, to: u128, workers: usize) -> Result<(Table, bool), CliError> {
    let report = verify_window_range(kind.into(), from, to, workers)?;
    eprintln!(
        "checked={} failures={}",
        report.checked,
        report.failures.len()
    );
    let mut t = Table::new(&["kind", "from", "to", "checked", "failures", "failing_n"]);
    let name = match kind {
        Kind::Squares => "squares",
        Kind::Cubes => "cubes",
    };
    t.push(vec![
        Cell::Text(name.into()),
        Cell::Int(from),
        Cell::Int(to),
        Cell::Int(report.checked.into()),
        Cell::Int(report.failures.len() as u128),
        Cell::Text(joined(&report.failures)),
    ]);
    Ok((t, report.failures.is_empty()))
}

fn exponent(
    power: Power,
    r: Option<u64>,
    from: Option<u64>,
    to: Option<u64>,
    n: Option<u128>,
) -> Result<(Table, bool), CliError> {
    let results = match (r, from, to) {
        (Some(r), None, None) => vec![best_exponent(power, r)?],
        (None, Some(lo), Some(hi)) => exponent_table(power, lo, hi)?,
        _ => return Err(CliError::Usage("give --r, or both --from and --to".into())),
    };
    let mut columns = vec!["r", "best_c", "gamma_r", "gamma_r_float"];
    if n.is_some() {
        columns.extend(["n", "k_star"]);
    }
    let mut t = Table::new(&columns);
    for res in results {
        let mut row = vec![
            Cell::Int(res.r.into()),
            Cell::Int(res.best_c.into()),
            Cell::Text(format_ratio(&res.gamma_r)),
            Cell::Float(res.gamma_r_float),
        ];
        if let Some(n) = n {
            let kt = k_threshold_report(n, res.r, power)?;
            row.extend([Cell::Int(n), Cell::Int(kt.k_star)]);
        }
        t.push(row);
    }
    Ok((t, true))
}
