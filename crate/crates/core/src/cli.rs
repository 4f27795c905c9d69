//! The `xfree` command-line runner.
//!
//! Exit status: 0 on success, 1 when a checked inequality fails, 2 on a
//! violated precondition, 3 when a budget is exhausted, 64 for an unknown
//! subcommand, 65 for unparseable input, 74 for I/O errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::behrend::{behrend_1d_capped, behrend_lift_capped, lower_bound_table, BehrendRow};
use crate::cache::Cache;
use crate::container::{
    check_container_hypotheses, counting_budget, estimate_gamma_const, schedule, ContainerParams,
};
use crate::copies::{codegree_stats, enumerate_copies, primitive, CODEGREE_EDGE_CAP, CODEGREE_VERTEX_CAP};
use crate::error::{Error, Result};
use crate::grid::{vertex_count, GridSet};
use crate::pattern::{parse_pattern, parse_rational, Pattern, Rational, RationalTriple};
use crate::primes::{verify_pnt_constant, SIEVE_CAP};
use crate::provider::{RProvider, RValue};
use crate::solver::{count_xfree_subsets, solve_rx_exact, CountOptions, Provenance, SolveOptions};
use crate::supersat::{
    estimate_expected_gamma, exact_expected_gamma, filter_sequence, m_of_n, sample_many,
    sampling_setup, SamplingSetup, SequenceFilterReport, SupersatSample, EXACT_CAP,
};

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..12).contains(&exp) {
        trim(format!("{:.*}", (11 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mant.to_string()), sign, exp.abs())
    }
}

#[derive(Parser, Debug)]
#[command(name = "xfree", version, about = "Pattern-free subsets of [n]^d")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Pattern file: a `d k` header, then k lines of d coordinates
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[arg(long)]
    n: Option<u64>,
    /// Inclusive range `A:B`
    #[arg(long = "n-range", value_parser = parse_range)]
    n_range: Option<(u64, u64)>,
    #[arg(long)]
    m: Option<u64>,
    /// Rational such as `1/2`
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    samples: Option<u64>,
    /// Main budget of the subcommand
    #[arg(long)]
    cap: Option<u64>,
    /// Record cache directory [env: XFREE_CACHE]
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "all-triples")]
    all_triples: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact r_X(n) by branch and bound
    SolveRx(Common),
    /// Number of X-free subsets of [n]^d
    CountFree(Common),
    /// List every copy b + r·X inside [n]^d
    EnumCopies(Common),
    /// Edge count, average degree and co-degrees of the copies hypergraph
    Stats(Common),
    /// One-dimensional sphere-shell construction
    Behrend {
        #[command(flatten)]
        common: Common,
        /// Use the triple {0, t, 1} instead of a pattern file
        #[arg(long)]
        t: Option<String>,
        /// Write the constructed set to this file
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// X-free set in [n]^d through the slab lift
    Lift {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Seeded draws of the prime/base-point sub-grid experiment
    SupersatSample {
        #[command(flatten)]
        common: Common,
        /// Set file (`# n=.. d=..` header); defaults to the full grid
        #[arg(long)]
        set: Option<PathBuf>,
    },
    /// Exact expectation of the sub-grid experiment
    SupersatExact {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        set: Option<PathBuf>,
    },
    /// Check π(ℓ) ≥ ℓ/(2 ln ℓ) on a range
    PntCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        l0: u64,
        #[arg(long)]
        lmax: u64,
    },
    /// Keep the n with r(n)/n^d ≥ α·r(m(n))/m(n)^d
    SequenceFilter {
        #[command(flatten)]
        common: Common,
        /// `formula` (the m(n) display) or `half` (⌈n/2⌉)
        #[arg(long = "m-map", default_value = "formula")]
        m_map: String,
        /// File of `n r` lines used after the cache and solver
        #[arg(long = "r-values")]
        r_values: Option<PathBuf>,
    },
    /// ε(n), τ(n), Δ and the container hypotheses
    ContainerParams {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long = "r-values")]
        r_values: Option<PathBuf>,
    },
    /// Container parameters with exact counts where available
    BudgetReport {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long = "r-values")]
        r_values: Option<PathBuf>,
    },
    /// Re-verify a record cache
    CacheCheck {
        #[command(flatten)]
        common: Common,
        /// Rewrite records.txt with one line per (pattern, n)
        #[arg(long)]
        compact: bool,
    },
}

fn parse_range(s: &str) -> std::result::Result<(u64, u64), String> {
    let (a, b) = s.split_once(':').ok_or("expected A:B")?;
    let a: u64 = a.trim().parse().map_err(|_| format!("bad integer {a:?}"))?;
    let b: u64 = b.trim().parse().map_err(|_| format!("bad integer {b:?}"))?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a, b))
}

/// Largest `n^d` the runner solves exactly on demand for r-values.
const AUTO_SOLVE_VERTICES: u64 = 40;
/// Largest `n^d` for which `budget-report` counts X-free sets.
const AUTO_COUNT_VERTICES: u64 = 30;

impl Common {
    fn pattern(&self) -> Result<Pattern> {
        let path = self
            .pattern
            .as_ref()
            .ok_or(Error::InvalidArgument("--pattern is required".into()))?;
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_pattern(&text)
    }

    fn single_n(&self) -> Result<u64> {
        self.n.ok_or(Error::InvalidArgument("--n is required".into()))
    }

    fn ns(&self) -> Result<Vec<u64>> {
        match (self.n, self.n_range) {
            (Some(n), None) => Ok(vec![n]),
            (None, Some((a, b))) => Ok((a..=b).collect()),
            (Some(_), Some(_)) => {
                Err(Error::InvalidArgument("give either --n or --n-range, not both".into()))
            }
            (None, None) => Err(Error::InvalidArgument("--n or --n-range is required".into())),
        }
    }

    fn alpha(&self) -> Result<Option<Rational>> {
        self.alpha.as_deref().map(parse_rational).transpose()
    }

    fn cache(&self) -> Result<Option<Cache>> {
        match &self.cache {
            Some(d) => Cache::open(d).map(Some),
            None => Cache::from_env(),
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn read_set(path: &Path) -> Result<GridSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    GridSet::parse_text(&text)
}

fn read_r_values(path: Option<&PathBuf>) -> Result<BTreeMap<u64, u64>> {
    let Some(path) = path else { return Ok(BTreeMap::new()) };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::parse(i + 1, crate::error::ParseErrorKind::Malformed);
        if f.len() != 2 {
            return Err(bad());
        }
        out.insert(f[0].parse().map_err(|_| bad())?, f[1].parse().map_err(|_| bad())?);
    }
    Ok(out)
}

fn to_big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact cache, then the exact solver on small grids, then the Behrend
/// construction, then user values.
struct RunnerProvider<'a> {
    cache: Option<&'a Cache>,
    user: BTreeMap<u64, u64>,
    workers: usize,
}

impl RProvider for RunnerProvider<'_> {
    fn r_value(&self, p: &Pattern, n: u64) -> Result<RValue> {
        if let Some(c) = self.cache {
            if let Some(r) = c.lookup(p, n)? {
                if r.exact {
                    return Ok(RValue::from(&r));
                }
            }
        }
        if vertex_count(n, p.d()).is_some_and(|v| v <= AUTO_SOLVE_VERTICES) {
            let opts = SolveOptions { workers: self.workers, ..SolveOptions::default() };
            let r = solve_rx_exact(p, n, &opts)?;
            if r.exact {
                if let Some(c) = self.cache {
                    c.store(p, &r)?;
                }
                return Ok(RValue::from(&r));
            }
        }
        if n >= 1 && vertex_count(n, p.d()).is_some_and(|v| v <= crate::behrend::LIFT_CAP) {
            let cert = crate::behrend::behrend_lift(p, n, false)?;
            return Ok(RValue {
                value: cert.set_size(),
                exact: false,
                provenance: Provenance::Behrend,
            });
        }
        self.user.get(&n).map(|&v| RValue::user(v)).ok_or(Error::ProviderMiss(n))
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 64,
                _ => 65,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("xfree: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::SolveRx(c) => solve_rx(&c),
        Command::CountFree(c) => count_free(&c),
        Command::EnumCopies(c) => enum_copies(&c),
        Command::Stats(c) => stats(&c),
        Command::Behrend { common, t, witness } => behrend(&common, t.as_deref(), witness.as_deref()),
        Command::Lift { common, witness } => lift(&common, witness.as_deref()),
        Command::SupersatSample { common, set } => supersat_sample(&common, set.as_deref()),
        Command::SupersatExact { common, set } => supersat_exact(&common, set.as_deref()),
        Command::PntCheck { common, l0, lmax } => pnt_check(&common, l0, lmax),
        Command::SequenceFilter { common, m_map, r_values } => {
            sequence_filter(&common, &m_map, r_values.as_ref())
        }
        Command::ContainerParams { common, gamma, r_values } => {
            container(&common, gamma, r_values.as_ref(), false)
        }
        Command::BudgetReport { common, gamma, r_values } => {
            container(&common, gamma, r_values.as_ref(), true)
        }
        Command::CacheCheck { common, compact } => cache_check(&common, compact),
    }
}

fn solve_rx(c: &Common) -> Result<i32> {
    let p = primitive(&c.pattern()?).into_owned();
    let cache = c.cache()?;
    let mut out = String::new();
    for n in c.ns()? {
        if let Some(r) = cache.as_ref().map(|k| k.lookup(&p, n)).transpose()?.flatten() {
            if r.exact {
                let _ = writeln!(out, "{}", r.lower);
                continue;
            }
        }
        let mut opts = SolveOptions { workers: c.workers.max(1), ..SolveOptions::default() };
        if let Some(cap) = c.cap {
            opts.node_budget = cap;
        }
        let r = solve_rx_exact(&p, n, &opts)?;
        if let Some(k) = &cache {
            k.store(&p, &r)?;
        }
        if r.exact {
            let _ = writeln!(out, "{}", r.lower);
        } else {
            let _ = writeln!(out, "{}..{}", r.lower, r.upper);
        }
    }
    c.emit(&out)?;
    Ok(0)
}

fn count_free(c: &Common) -> Result<i32> {
    let p = c.pattern()?;
    let mut opts = CountOptions::default();
    if let Some(cap) = c.cap {
        opts.vertex_cap = cap;
    }
    let mut out = String::new();
    for n in c.ns()? {
        let _ = writeln!(out, "{}", count_xfree_subsets(&p, n, &opts)?.count_decimal());
    }
    c.emit(&out)?;
    Ok(0)
}

fn enum_copies(c: &Common) -> Result<i32> {
    let p = primitive(&c.pattern()?).into_owned();
    let n = c.single_n()?;
    let cap = c.cap.unwrap_or(10_000_000);
    let total = crate::copies::count_copies_closed_form(&p, n);
    if total > cap as u128 {
        return Err(Error::Budget { what: "copies listed", cap });
    }
    let mut out = String::from("ratio");
    for i in 1..=p.d() {
        let _ = write!(out, ",b{i}");
    }
    out.push('\n');
    for cp in enumerate_copies(&p, n) {
        let _ = write!(out, "{}", cp.ratio);
        for b in &cp.base {
            let _ = write!(out, ",{b}");
        }
        out.push('\n');
    }
    c.emit(&out)?;
    Ok(0)
}

fn stats(c: &Common) -> Result<i32> {
    let p = primitive(&c.pattern()?).into_owned();
    let mut out = String::from("n,edges,vertices,avg_degree");
    for j in 2..=p.k() {
        let _ = write!(out, ",delta_{j}");
    }
    out.push_str(",gamma_estimate\n");
    for n in c.ns()? {
        let vcap = c.cap.unwrap_or(CODEGREE_VERTEX_CAP);
        let h = crate::copies::codegree_stats_capped(&p, n, vcap, CODEGREE_EDGE_CAP)?;
        let _ = write!(out, "{},{},{},{}", n, h.edge_count, h.vertex_count, fmt_float(h.avg_degree));
        for d in &h.codegrees {
            let _ = write!(out, ",{d}");
        }
        let _ = writeln!(out, ",{}", fmt_float(h.gamma_estimate));
    }
    c.emit(&out)?;
    Ok(0)
}

fn behrend(c: &Common, t: Option<&str>, witness: Option<&Path>) -> Result<i32> {
    let triple = match t {
        Some(t) => {
            let zero = Rational::from_integer(0);
            RationalTriple::new(zero, parse_rational(t)?, Rational::from_integer(1))?
        }
        None => RationalTriple::from_pattern(&primitive(&c.pattern()?))?,
    };
    let n = c.single_n()?;
    let cert = behrend_1d_capped(&triple, n, c.cap.unwrap_or(crate::behrend::VERIFY_CAP))?;
    if let Some(w) = witness {
        let text: String = format!("# n={n} d=1\n")
            + &cert.set.iter().map(|a| format!("{a}\n")).collect::<String>();
        std::fs::write(w, text).map_err(|e| Error::io(w, e))?;
    }
    c.emit(&cert.to_text())?;
    Ok(0)
}

fn lift(c: &Common, witness: Option<&Path>) -> Result<i32> {
    let p = primitive(&c.pattern()?).into_owned();
    let cache = c.cache()?;
    if let Some((a, b)) = c.n_range {
        let ns: Vec<u64> = (a..=b).collect();
        let rows = lower_bound_table(&p, &ns, c.all_triples)?;
        let mut out = format!("{}\n", BehrendRow::csv_header());
        for r in &rows {
            let _ = writeln!(out, "{}", r.to_csv());
            if let (Some(k), true) = (&cache, r.record.witness.is_some()) {
                k.store(&p, &r.record)?;
            }
        }
        c.emit(&out)?;
        return Ok(0);
    }
    let n = c.single_n()?;
    let cap = c.cap.unwrap_or(crate::behrend::VERIFY_CAP);
    let cert = behrend_lift_capped(&p, n, c.all_triples, cap)?;
    if let Some(w) = witness {
        std::fs::write(w, cert.set.to_text()).map_err(|e| Error::io(w, e))?;
    }
    if let Some(k) = &cache {
        if cert.effective_n == n && cert.verified {
            let rows = lower_bound_table(&p, &[n], c.all_triples)?;
            k.store(&p, &rows[0].record)?;
        }
    }
    c.emit(&cert.to_text())?;
    Ok(if cert.checked && !cert.verified { 1 } else { 0 })
}

fn supersat_inputs(c: &Common, set: Option<&Path>) -> Result<(Pattern, GridSet, SamplingSetup)> {
    let p = primitive(&c.pattern()?).into_owned();
    let a = match set {
        Some(path) => read_set(path)?,
        None => GridSet::full(c.single_n()?, p.d())?,
    };
    if let Some(n) = c.n {
        if n != a.n() {
            return Err(Error::InvalidArgument(format!("--n {n} disagrees with the set's n={}", a.n())));
        }
    }
    let m = c.m.ok_or(Error::InvalidArgument("--m is required".into()))?;
    let cache = c.cache()?;
    let known = cache.as_ref().map(|k| k.lookup(&p, a.n())).transpose()?.flatten();
    let (lower, upper) = match known {
        Some(r) => (r.lower, Some(r.upper).filter(|&u| r.exact || Some(u) < vertex_count(r.n, r.d))),
        None => {
            let lower = if vertex_count(a.n(), a.d()).is_some_and(|v| v <= crate::behrend::LIFT_CAP) {
                crate::behrend::behrend_lift(&p, a.n(), false)?.set_size()
            } else {
                0
            };
            (lower, None)
        }
    };
    let setup = sampling_setup(&a, &p, m, lower, upper)?;
    eprintln!(
        "primes = {:?}; {}; size threshold {} {}",
        setup.primes,
        setup.admissibility.as_str(),
        setup.size_threshold,
        if setup.size_threshold_met { "met" } else { "not met" }
    );
    Ok((p, a, setup))
}

fn supersat_sample(c: &Common, set: Option<&Path>) -> Result<i32> {
    let (p, a, setup) = supersat_inputs(c, set)?;
    let count = c.samples.unwrap_or(1);
    if count == 0 {
        return Err(Error::InvalidArgument("--samples must be positive".into()));
    }
    let mut out = format!("{}\n", SupersatSample::csv_header(a.d()));
    for s in sample_many(&setup, &a, &p, c.seed, count) {
        let _ = writeln!(out, "{}", s.to_csv());
    }
    c.emit(&out)?;
    Ok(0)
}

fn supersat_exact(c: &Common, set: Option<&Path>) -> Result<i32> {
    let (p, a, setup) = supersat_inputs(c, set)?;
    if c.cap.is_some_and(|cap| cap < EXACT_CAP) {
        let cap = c.cap.unwrap();
        let work: u128 = setup
            .primes
            .iter()
            .map(|&q| ((setup.n - setup.m * q) as u128 * setup.m as u128).pow(setup.d as u32))
            .sum();
        if work > cap as u128 {
            return Err(Error::Budget { what: "exact expectation work", cap });
        }
    }
    let rep = exact_expected_gamma(&setup, &a, &p)?;
    eprintln!(
        "mean size bound {}; region bound {}",
        if rep.mean_size_bound_holds() { "holds" } else { "FAILS" },
        if rep.region_bound_holds() { "holds" } else { "FAILS" }
    );
    if let Some(k) = c.samples {
        let mc = estimate_expected_gamma(&setup, &a, &p, k, c.seed)?;
        eprintln!(
            "monte carlo mean {} stderr {} over {} samples",
            fmt_float(mc.mean),
            fmt_float(mc.stderr),
            mc.samples
        );
    }
    c.emit(&rep.to_csv())?;
    Ok(0)
}

fn pnt_check(c: &Common, l0: u64, lmax: u64) -> Result<i32> {
    let rep = verify_pnt_constant(l0, lmax, c.cap.unwrap_or(SIEVE_CAP))?;
    match rep.first_violation {
        None => {
            c.emit("OK\n")?;
            Ok(0)
        }
        Some(l) => {
            c.emit(&format!("VIOLATION {l}\n"))?;
            Ok(1)
        }
    }
}

fn sequence_filter(c: &Common, m_map: &str, r_values: Option<&PathBuf>) -> Result<i32> {
    let p = primitive(&c.pattern()?).into_owned();
    let (lo, hi) = c.n_range.ok_or(Error::InvalidArgument("--n-range is required".into()))?;
    let alpha = to_big(&c.alpha()?.ok_or(Error::InvalidArgument("--alpha is required".into()))?);
    let cache = c.cache()?;
    let provider = RunnerProvider {
        cache: cache.as_ref(),
        user: read_r_values(r_values)?,
        workers: c.workers.max(1),
    };
    let mut table: BTreeMap<u64, RValue> = BTreeMap::new();
    let mut maps: BTreeMap<u64, u64> = BTreeMap::new();
    for n in lo..=hi {
        let m = match m_map {
            "half" => n.div_ceil(2),
            "formula" => m_of_n(&p, n, &provider)?.min(n),
            other => return Err(Error::InvalidArgument(format!("unknown --m-map {other:?}"))),
        };
        maps.insert(n, m);
        for x in [n, m] {
            if let std::collections::btree_map::Entry::Vacant(e) = table.entry(x) {
                e.insert(provider.r_value(&p, x)?);
            }
        }
    }
    let rep: SequenceFilterReport = filter_sequence(&table, |n| maps[&n], &alpha, p.d(), (lo, hi))?;
    c.emit(&rep.to_csv())?;
    Ok(0)
}

fn container(c: &Common, gamma: Option<f64>, r_values: Option<&PathBuf>, counts: bool) -> Result<i32> {
    let p = primitive(&c.pattern()?).into_owned();
    let ns = c.ns()?;
    let alpha = c.alpha()?.map_or(0.5, |a| to_f64(&a));
    let gamma = match gamma {
        Some(g) => g,
        None => estimate_gamma_const(&p, (ns[0], *ns.last().unwrap()))?.gamma,
    };
    let cache = c.cache()?;
    let provider = RunnerProvider {
        cache: cache.as_ref(),
        user: read_r_values(r_values)?,
        workers: c.workers.max(1),
    };
    let mut out = format!("{}\n", ContainerParams::csv_header());
    for n in ns {
        let r = provider.r_value(&p, n)?;
        let s = schedule(n, p.d(), p.k(), r, gamma)?;
        let summary = vertex_count(n, p.d())
            .filter(|&v| v <= CODEGREE_VERTEX_CAP)
            .and_then(|_| codegree_stats(&p, n).ok())
            .filter(|h| h.edge_count > 0);
        let h = check_container_hypotheses(&s, summary.as_ref())?;
        let count_ln = if counts && vertex_count(n, p.d()).is_some_and(|v| v <= AUTO_COUNT_VERTICES) {
            let rec = count_xfree_subsets(&p, n, &CountOptions::default())?;
            Some(rec.log2_count * std::f64::consts::LN_2)
        } else {
            None
        };
        let params = counting_budget(&s, h, alpha, count_ln)?;
        let _ = writeln!(out, "{}", params.to_csv());
    }
    c.emit(&out)?;
    Ok(0)
}

fn cache_check(c: &Common, compact: bool) -> Result<i32> {
    let dir = match &c.cache {
        Some(d) => d.clone(),
        None => std::env::var_os(crate::cache::CACHE_ENV)
            .map(PathBuf::from)
            .ok_or(Error::InvalidArgument("--cache or XFREE_CACHE is required".into()))?,
    };
    let rep = crate::cache::cache_roundtrip(&dir, compact)?;
    c.emit(&rep.to_text())?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(0.375), "0.375");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(16.0), "16");
        assert_eq!(fmt_float(1.5e-7), "1.5e-07");
        assert_eq!(fmt_float(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_float(-2.5), "-2.5");
        assert_eq!(fmt_float(f64::NAN), "nan");
    }

    #[test]
    fn range_parser() {
        assert_eq!(parse_range("3:7"), Ok((3, 7)));
        assert!(parse_range("7:3").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn exit_codes_for_bad_input() {
        assert_eq!(run(["xfree", "frobnicate"]), 64);
        assert_eq!(run(["xfree", "solve-rx", "--n", "abc"]), 65);
        assert_eq!(run(["xfree", "pnt-check", "--l0", "3", "--lmax", "100"]), 0);
    }
}
