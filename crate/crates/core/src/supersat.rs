//! Supersaturation audits: sets larger than `r_X(n)` contain many copies.
//!
//! The sampling experiment draws a prime `p ≤ |A|/(4·d·n^{d−1}·M)` and a
//! base point `b ∈ {0, …, n − Mp − 1}^d`, and looks at `A` restricted to
//! the dilated sub-grid `b + p·[M]^d`.
//!
//! Logarithms are natural throughout.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cli::fmt_float;
use crate::copies::{gamma_count, is_x_free, primitive};
use crate::error::{Error, Result};
use crate::grid::{vertex_count, GridSet};
use crate::pattern::Pattern;
use crate::primes::{primes_up_to, SIEVE_CAP};
use crate::provider::{RProvider, RValue};
use crate::solver::RNumberRecord;

/// Threshold from which `π(ℓ) ≥ ℓ/(2 ln ℓ)` has been checked.
pub const PNT_L0: u64 = 3;
/// Largest `Σ_p (n − Mp)^d · M^d` that `exact_expected_gamma` will visit.
pub const EXACT_CAP: u64 = 200_000_000;

/// `Γ_X(A) ≥ |A| − r_X(n)`.
pub fn check_supersat_trivial(a: &GridSet, p: &Pattern, r: &RNumberRecord) -> Result<bool> {
    if !r.exact {
        return Err(Error::Precondition("the trivial bound needs an exact r_X(n)".into()));
    }
    if r.n != a.n() || r.d != a.d() {
        return Err(Error::InvalidArgument(format!(
            "record is for n={} d={}, set lives in n={} d={}",
            r.n,
            r.d,
            a.n(),
            a.d()
        )));
    }
    Ok(gamma_count(a, p) as i128 >= a.len() as i128 - r.lower as i128)
}

/// How `|A| > r_X(n)` was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admissibility {
    /// An upper bound on `r_X(n)` is below `|A|`.
    Proven,
    /// Only a lower bound on `r_X(n)` is below `|A|`.
    Conditional,
}

impl Admissibility {
    pub fn as_str(self) -> &'static str {
        match self {
            Admissibility::Proven => "admissible",
            Admissibility::Conditional => "conditionally admissible",
        }
    }
}

/// The prime range and precondition status of one sampling instance.
#[derive(Debug, Clone)]
pub struct SamplingSetup {
    pub n: u64,
    pub d: usize,
    pub m: u64,
    pub set_size: u64,
    pub primes: Vec<u64>,
    /// `4·ℓ0·d·n^{d−1}·M`.
    pub size_threshold: u128,
    /// Whether `|A|` exceeds `size_threshold`.
    pub size_threshold_met: bool,
    pub admissibility: Admissibility,
}

impl SamplingSetup {
    /// Both parts of `|A| > max{4ℓ0·d·n^{d−1}·M, r_X(n)}` hold, the second
    /// with an upper bound.
    pub fn fully_admissible(&self) -> bool {
        self.size_threshold_met && self.admissibility == Admissibility::Proven
    }
}

/// Checks the sampling preconditions against whatever is known about
/// `r_X(n)`; `r_upper` is an upper bound when one is available.
///
/// Hard requirements are a nonempty `A`, `M ≥ 2`, `|A|` above the `r_X(n)`
/// surrogate and at least one prime in range. The `4ℓ0·d·n^{d−1}·M` term
/// is reported in the setup.
pub fn sampling_setup(
    a: &GridSet,
    p: &Pattern,
    m: u64,
    r_lower: u64,
    r_upper: Option<u64>,
) -> Result<SamplingSetup> {
    if a.is_empty() {
        return Err(Error::Precondition("|A| > r_X(n) fails: A is empty".into()));
    }
    if m < 2 {
        return Err(Error::Precondition(format!("M >= 2 fails: M = {m}")));
    }
    let (n, d) = (a.n(), a.d());
    let size = a.len() as u64;
    let mut upper = r_upper;
    if upper.is_none_or(|u| u >= size) && Some(size) == vertex_count(n, d) && !is_x_free(a, p) {
        // the full grid holds a copy, so r_X(n) < n^d
        upper = Some(size - 1);
    }
    let admissibility = match upper {
        Some(u) if u < size => Admissibility::Proven,
        _ if r_lower < size => Admissibility::Conditional,
        _ => {
            return Err(Error::Precondition(format!(
                "|A| > r_X(n) fails: |A| = {size}, r_X(n) >= {r_lower}"
            )))
        }
    };
    let denom = 4 * d as u128 * (n as u128).pow(d as u32 - 1) * m as u128;
    let bound = (size as u128 / denom) as u64;
    let primes: Vec<u64> = primes_up_to(bound, SIEVE_CAP)?
        .into_iter()
        .filter(|&q| q * m < n)
        .collect();
    if primes.is_empty() {
        return Err(Error::Precondition(format!(
            "no admissible prime: |A|/(4·d·n^(d-1)·M) = {size}/{denom} < 2"
        )));
    }
    Ok(SamplingSetup {
        n,
        d,
        m,
        set_size: size,
        primes,
        size_threshold: PNT_L0 as u128 * denom,
        size_threshold_met: size as u128 > PNT_L0 as u128 * denom,
        admissibility,
    })
}

/// [`sampling_setup`] with the bounds taken from a solver record.
pub fn sampling_setup_from_record(
    a: &GridSet,
    p: &Pattern,
    m: u64,
    r: &RNumberRecord,
) -> Result<SamplingSetup> {
    let upper = (r.exact || r.upper < vertex_count(r.n, r.d).unwrap_or(u64::MAX))
        .then_some(r.upper);
    sampling_setup(a, p, m, r.lower, upper)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupersatSample {
    pub prime: u64,
    pub base: Vec<i64>,
    pub size_ab: u64,
    pub gamma_ab: u128,
}

impl SupersatSample {
    pub fn csv_header(d: usize) -> String {
        let mut s = String::from("p");
        for i in 1..=d {
            let _ = write!(s, ",b{i}");
        }
        s.push_str(",size_ab,gamma_ab");
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.prime.to_string();
        for b in &self.base {
            let _ = write!(s, ",{b}");
        }
        let _ = write!(s, ",{},{}", self.size_ab, self.gamma_ab);
        s
    }
}

/// `A ∩ (b + prime·[M]^d)` in the sub-grid's own coordinates `[M]^d`.
pub fn restrict_to_subgrid(a: &GridSet, m: u64, prime: u64, base: &[i64]) -> GridSet {
    let d = a.d();
    let mut out = GridSet::empty(m, d).expect("sub-grid fits");
    let mut c = vec![1i64; d];
    let mut x = vec![0i64; d];
    loop {
        for i in 0..d {
            x[i] = base[i] + prime as i64 * c[i];
        }
        if a.contains(&x) {
            out.insert(&c).expect("point in range");
        }
        let mut i = 0;
        while i < d {
            if c[i] < m as i64 {
                c[i] += 1;
                break;
            }
            c[i] = 1;
            i += 1;
        }
        if i == d {
            return out;
        }
    }
}

fn evaluate(a: &GridSet, p: &Pattern, m: u64, prime: u64, base: Vec<i64>) -> SupersatSample {
    let sub = restrict_to_subgrid(a, m, prime, &base);
    SupersatSample { prime, size_ab: sub.len() as u64, gamma_ab: gamma_count(&sub, p), base }
}

/// Sample `index` of the seeded stream. The prime and the base point are
/// drawn from separate ChaCha streams so samples are independent of one
/// another and of evaluation order.
pub fn sample_at(
    setup: &SamplingSetup,
    a: &GridSet,
    p: &Pattern,
    seed: u64,
    index: u64,
) -> SupersatSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * index);
    let prime = setup.primes[rng.random_range(0..setup.primes.len())];
    rng.set_stream(2 * index + 1);
    rng.set_word_pos(0);
    let span = (setup.n - setup.m * prime) as i64;
    let base = (0..setup.d).map(|_| rng.random_range(0..span)).collect();
    evaluate(a, p, setup.m, prime, base)
}

/// One draw of the experiment.
pub fn sample_subgrid(
    a: &GridSet,
    p: &Pattern,
    m: u64,
    seed: u64,
    r: &RNumberRecord,
) -> Result<SupersatSample> {
    let setup = sampling_setup_from_record(a, p, m, r)?;
    Ok(sample_at(&setup, a, p, seed, 0))
}

/// Samples `0..count` of the seeded stream, in index order.
pub fn sample_many(
    setup: &SamplingSetup,
    a: &GridSet,
    p: &Pattern,
    seed: u64,
    count: u64,
) -> Vec<SupersatSample> {
    (0..count).into_par_iter().map(|i| sample_at(setup, a, p, seed, i)).collect()
}

#[derive(Debug, Clone)]
pub struct MonteCarloEstimate {
    pub samples: u64,
    pub mean: f64,
    pub stderr: f64,
}

/// Seeded Monte-Carlo mean of `Γ_X(A_b)` with its standard error.
pub fn estimate_expected_gamma(
    setup: &SamplingSetup,
    a: &GridSet,
    p: &Pattern,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let draws = sample_many(setup, a, p, seed, samples);
    let k = samples as f64;
    let mean = draws.iter().map(|s| s.gamma_ab as f64).sum::<f64>() / k;
    let var = if samples > 1 {
        draws.iter().map(|s| (s.gamma_ab as f64 - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Ok(MonteCarloEstimate { samples, mean, stderr: (var / k).sqrt() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimeAudit {
    pub prime: u64,
    /// `|A ∩ I_p|` with `I_p = {0, …, n − Mp − 1}^d ∩ [n]^d`.
    pub region_size: u64,
    pub mean_size: BigRational,
    pub mean_gamma: BigRational,
}

#[derive(Debug, Clone)]
pub struct ExpectationReport {
    pub setup: SamplingSetup,
    pub mean_gamma: BigRational,
    pub mean_size: BigRational,
    pub per_prime: Vec<PrimeAudit>,
}

impl ExpectationReport {
    /// `E|A_b| ≥ (|A|/2)·(M/n)^d`.
    pub fn mean_size_bound_holds(&self) -> bool {
        let s = &self.setup;
        let lhs = &self.mean_size * big(2) * big(s.n).pow(s.d as i32);
        lhs >= big(s.set_size) * big(s.m).pow(s.d as i32)
    }

    /// `|A ∩ I_p| > |A|/2` for every prime in range.
    pub fn region_bound_holds(&self) -> bool {
        self.per_prime.iter().all(|pa| 2 * pa.region_size > self.setup.set_size)
    }

    pub fn csv_header() -> &'static str {
        "prime,exact_mean_ab,exact_mean_gamma"
    }

    /// One row per prime, then an `all` row with the overall means.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::csv_header());
        s.push('\n');
        for pa in &self.per_prime {
            let _ = writeln!(s, "{},{},{}", pa.prime, pa.mean_size, pa.mean_gamma);
        }
        let _ = writeln!(s, "all,{},{}", self.mean_size, self.mean_gamma);
        s
    }
}

fn big(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `E[Γ_X(A_b)]` exactly: uniform over primes, then uniform over bases.
pub fn exact_expected_gamma(
    setup: &SamplingSetup,
    a: &GridSet,
    p: &Pattern,
) -> Result<ExpectationReport> {
    let (n, d, m) = (setup.n, setup.d, setup.m);
    let work: u128 = setup
        .primes
        .iter()
        .map(|&q| ((n - m * q) as u128).pow(d as u32) * (m as u128).pow(d as u32))
        .sum();
    if work > EXACT_CAP as u128 {
        return Err(Error::Budget { what: "exact expectation work", cap: EXACT_CAP });
    }
    let per_prime: Vec<PrimeAudit> = setup
        .primes
        .par_iter()
        .map(|&q| {
            let span = n - m * q;
            let bases = span.pow(d as u32);
            let mut size_sum = 0u128;
            let mut gamma_sum = 0u128;
            let mut b = vec![0i64; d];
            loop {
                let s = evaluate(a, p, m, q, b.clone());
                size_sum += s.size_ab as u128;
                gamma_sum += s.gamma_ab;
                let mut i = 0;
                while i < d {
                    if b[i] + 1 < span as i64 {
                        b[i] += 1;
                        break;
                    }
                    b[i] = 0;
                    i += 1;
                }
                if i == d {
                    break;
                }
            }
            let region_size = a
                .indices()
                .filter(|&idx| a.point_of(idx).iter().all(|&x| x < span as i64))
                .count() as u64;
            let denom = BigInt::from(bases);
            PrimeAudit {
                prime: q,
                region_size,
                mean_size: BigRational::new(BigInt::from(size_sum), denom.clone()),
                mean_gamma: BigRational::new(BigInt::from(gamma_sum), denom),
            }
        })
        .collect();
    let count = big(per_prime.len() as u64);
    let mean_size = per_prime.iter().fold(BigRational::zero(), |acc, x| acc + &x.mean_size) / &count;
    let mean_gamma =
        per_prime.iter().fold(BigRational::zero(), |acc, x| acc + &x.mean_gamma) / &count;
    Ok(ExpectationReport { setup: setup.clone(), mean_gamma, mean_size, per_prime })
}

#[derive(Debug, Clone)]
pub struct PrimeBoundReport {
    pub gamma: u128,
    pub rhs: f64,
    pub holds: bool,
}

/// `Γ_X(A) ≥ (|A|/(11·d·ln²n))·(n/M)·(|A|/(2n^d) − r_X(M)/M^d)`.
///
/// Needs exact `r_X(n)` and `r_X(M)`, and `|A|` above both
/// `4ℓ0·d·n^{d−1}·M` and `r_X(n)`.
pub fn check_supersat_prime(
    a: &GridSet,
    p: &Pattern,
    m: u64,
    r_n: &RNumberRecord,
    r_m: &RNumberRecord,
) -> Result<PrimeBoundReport> {
    if !r_n.exact || !r_m.exact {
        return Err(Error::Precondition("exact r_X(n) and r_X(M) are required".into()));
    }
    if r_m.n != m || r_n.n != a.n() {
        return Err(Error::InvalidArgument("records do not match n and M".into()));
    }
    let setup = sampling_setup(a, p, m, r_n.lower, Some(r_n.upper))?;
    if !setup.size_threshold_met {
        return Err(Error::Precondition(format!(
            "|A| > 4·l0·d·n^(d-1)·M fails: |A| = {}, threshold {}",
            setup.set_size, setup.size_threshold
        )));
    }
    let (n, d) = (a.n() as f64, a.d() as i32);
    let size = a.len() as f64;
    let density_gap = size / (2.0 * n.powi(d)) - r_m.lower as f64 / (m as f64).powi(d);
    let rhs = size / (11.0 * d as f64 * n.ln().powi(2)) * (n / m as f64) * density_gap;
    let gamma = gamma_count(a, p);
    Ok(PrimeBoundReport { gamma, rhs, holds: rhs <= 0.0 || gamma as f64 >= rhs })
}

/// `max(2, ⌊(n/ln^{3k} n)·(r_X(n)/n^d)^{k+2}⌋)`.
pub fn m_of_n(p: &Pattern, n: u64, provider: &dyn RProvider) -> Result<u64> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("m(n) needs n >= 3, got {n}")));
    }
    let r = provider.r_value(p, n)?;
    Ok(m_of_n_value(n, p.d(), p.k(), r.value))
}

pub fn m_of_n_value(n: u64, d: usize, k: usize, r: u64) -> u64 {
    let ln_n = (n as f64).ln();
    let log_m = ln_n - 3.0 * k as f64 * ln_n.ln()
        + (k + 2) as f64 * ((r as f64).ln() - d as f64 * ln_n);
    let m = log_m.exp().floor();
    if m.is_finite() && m > 2.0 {
        m as u64
    } else {
        2
    }
}

/// `exp(−5·ĉ²·k/2) / 2`.
pub fn alpha_default(c_hat: f64, k: usize) -> Result<f64> {
    if !(c_hat > 0.0) {
        return Err(Error::InvalidArgument(format!("c_hat must be positive, got {c_hat}")));
    }
    Ok((-5.0 * c_hat * c_hat * k as f64 / 2.0).exp() / 2.0)
}

/// The exact binary value of an `f64` as a rational.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or(Error::InvalidArgument(format!("{x} is not finite")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterRow {
    pub n: u64,
    pub m_n: u64,
    pub r_n: RValue,
    pub r_mn: RValue,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct SequenceFilterReport {
    pub alpha: BigRational,
    pub range: (u64, u64),
    pub rows: Vec<FilterRow>,
}

impl SequenceFilterReport {
    pub fn accepted(&self) -> Vec<u64> {
        self.rows.iter().filter(|r| r.accepted).map(|r| r.n).collect()
    }

    pub fn csv_header() -> &'static str {
        "n,m_n,r_n,r_mn,accepted"
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::csv_header());
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.n,
                r.m_n,
                r.r_n.value,
                r.r_mn.value,
                if r.accepted { 1 } else { 0 }
            );
        }
        s
    }
}

/// Keeps the `n` in `range` with `r(n)/n^d ≥ α·r(m(n))/m(n)^d`, compared
/// exactly.
pub fn filter_sequence(
    r_table: &BTreeMap<u64, RValue>,
    m_map: impl Fn(u64) -> u64,
    alpha: &BigRational,
    d: usize,
    range: (u64, u64),
) -> Result<SequenceFilterReport> {
    if alpha < &BigRational::zero() {
        return Err(Error::InvalidArgument("alpha must be nonnegative".into()));
    }
    let lookup = |n: u64| r_table.get(&n).copied().ok_or(Error::ProviderMiss(n));
    let mut rows = Vec::new();
    for n in range.0..=range.1 {
        let m = m_map(n);
        if m == 0 || m > n {
            return Err(Error::InvalidArgument(format!("m({n}) = {m} must lie in [1, n]")));
        }
        let (r_n, r_mn) = (lookup(n)?, lookup(m)?);
        // r(n)·m^d ≥ α·r(m)·n^d
        let lhs = big(r_n.value) * big(m).pow(d as i32);
        let rhs = alpha * big(r_mn.value) * big(n).pow(d as i32);
        rows.push(FilterRow { n, m_n: m, r_n, r_mn, accepted: lhs >= rhs });
    }
    Ok(SequenceFilterReport { alpha: alpha.clone(), range, rows })
}

#[derive(Debug, Clone)]
pub struct StrongBoundReport {
    pub gamma: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `(ln^{3k−2} n / (3d))·(n^d/r)^k·n^d`.
pub fn strong_bound_rhs(n: u64, d: usize, k: usize, r: u64) -> f64 {
    let ln_n = (n as f64).ln();
    let dn = d as f64 * ln_n;
    let log_rhs = (3 * k - 2) as f64 * ln_n.ln() - (3.0 * d as f64).ln()
        + k as f64 * (dn - (r as f64).ln())
        + dn;
    log_rhs.exp()
}

/// `Γ ≥ strong_bound_rhs` for a given `Γ`, after `α·|A| ≥ 4·r`.
pub fn check_strong_bound(
    gamma: f64,
    size: u64,
    n: u64,
    d: usize,
    k: usize,
    alpha: &BigRational,
    r: u64,
) -> Result<StrongBoundReport> {
    if alpha <= &BigRational::zero() || alpha * big(size) < big(4 * r) {
        return Err(Error::Precondition(format!(
            "|A| >= (4/alpha)·r_X(n) fails: |A| = {size}, r_X(n) = {r}, alpha = {alpha}"
        )));
    }
    let rhs = strong_bound_rhs(n, d, k, r);
    Ok(StrongBoundReport { gamma, rhs, holds: gamma >= rhs })
}

/// `Γ_X(A) ≥ (ln^{3k−2} n/(3d))·(n^d/r_X(n))^k·n^d` for `|A| ≥ (4/α)·r_X(n)`.
pub fn check_supersat_seq(
    a: &GridSet,
    p: &Pattern,
    alpha: &BigRational,
    r_n: &RNumberRecord,
) -> Result<StrongBoundReport> {
    if !r_n.exact {
        return Err(Error::Precondition("an exact r_X(n) is required".into()));
    }
    let p = primitive(p);
    let gamma = gamma_count(a, &p);
    check_strong_bound(gamma as f64, a.len() as u64, a.n(), a.d(), p.k(), alpha, r_n.lower)
}

/// A float for reports, 12 significant digits.
pub fn rational_display(r: &BigRational) -> String {
    let f = r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN);
    fmt_float(f)
}
