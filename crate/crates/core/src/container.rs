//! Parameter arithmetic for the hypergraph container count.
//!
//! Every quantity is carried as a natural logarithm and exponentiated only
//! for reporting, so `k!³` and `2^{k²}` never overflow.

use std::fmt::Write as _;

use crate::cli::fmt_float;
use crate::copies::{count_copies_closed_form, primitive, HypergraphSummary};
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::provider::{RProvider, RValue};

/// Largest pattern size the arithmetic accepts.
pub const MAX_K: usize = 8;

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

fn choose2(j: usize) -> f64 {
    (j * j.saturating_sub(1) / 2) as f64
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `ln Δ(H,τ)` for `Δ(H,τ) = 2^{C(k,2)−1} Σ_{j=2}^{k} 2^{−C(j−1,2)} Δ_j / (τ^{j−1}·d̄)`.
///
/// `codegrees[j − 2]` is `Δ_j`.
pub fn ln_delta_tau(k: usize, codegrees: &[f64], avg_degree: f64, tau: f64) -> Result<f64> {
    if !(avg_degree > 0.0) {
        return Err(Error::Precondition("average degree is zero: the hypergraph has no edges".into()));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    if codegrees.len() + 1 != k {
        return Err(Error::InvalidArgument(format!(
            "expected {} co-degrees, got {}",
            k - 1,
            codegrees.len()
        )));
    }
    let ln2 = std::f64::consts::LN_2;
    let terms: Vec<f64> = (2..=k)
        .map(|j| {
            let dj = codegrees[j - 2];
            if dj <= 0.0 {
                f64::NEG_INFINITY
            } else {
                -choose2(j - 1) * ln2 + dj.ln() - (j - 1) as f64 * tau.ln() - avg_degree.ln()
            }
        })
        .collect();
    Ok((choose2(k) - 1.0) * ln2 + log_sum_exp(&terms))
}

/// `Δ(H,τ)` evaluated directly, or through [`ln_delta_tau`] when the
/// direct sum overflows.
pub fn delta_tau_value(k: usize, codegrees: &[f64], avg_degree: f64, tau: f64) -> Result<f64> {
    let ln = ln_delta_tau(k, codegrees, avg_degree, tau)?;
    let direct = 2f64.powi(choose2(k) as i32 - 1)
        * (2..=k)
            .map(|j| {
                codegrees[j - 2] / (2f64.powi(choose2(j - 1) as i32) * tau.powi(j as i32 - 1) * avg_degree)
            })
            .sum::<f64>();
    Ok(if direct.is_finite() && direct > f64::MIN_POSITIVE { direct } else { ln.exp() })
}

/// `Δ(H,τ)` for a measured hypergraph.
pub fn delta_tau(summary: &HypergraphSummary, tau: f64) -> Result<f64> {
    let cd: Vec<f64> = summary.codegrees.iter().map(|&c| c as f64).collect();
    delta_tau_value(summary.k, &cd, summary.avg_degree, tau)
}

/// `ln` of the co-degree bound `2^{k²}·k³ / (τ^{k−1}·γ·n)`.
pub fn ln_delta_bounded(k: usize, ln_tau: f64, gamma: f64, n: u64) -> f64 {
    let kf = k as f64;
    kf * kf * std::f64::consts::LN_2 + 3.0 * kf.ln()
        - (kf - 1.0) * ln_tau
        - gamma.ln()
        - (n as f64).ln()
}

/// `ε(n)` and `τ(n)` for one side length.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub n: u64,
    pub d: usize,
    pub k: usize,
    pub r: RValue,
    pub gamma: f64,
    pub ln_epsilon: f64,
    pub ln_tau: f64,
}

impl Schedule {
    pub fn epsilon(&self) -> f64 {
        self.ln_epsilon.exp()
    }

    pub fn tau(&self) -> f64 {
        self.ln_tau.exp()
    }
}

/// `ε(n) = (1/3d)·(ln^{3k−2} n / n)·(n^d/r)^k` and
/// `τ(n) = (12·k!·2^{k²}·k³ / (γ·n·ε(n)))^{1/(k−1)}`.
pub fn schedule(n: u64, d: usize, k: usize, r: RValue, gamma: f64) -> Result<Schedule> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("the schedule needs n >= 3, got {n}")));
    }
    if !(3..=MAX_K).contains(&k) {
        return Err(Error::InvalidArgument(format!("|X| must lie in [3, {MAX_K}], got {k}")));
    }
    if r.value == 0 {
        return Err(Error::InvalidArgument("r-value must be positive".into()));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    let (kf, df) = (k as f64, d as f64);
    let ln_n = (n as f64).ln();
    let ln_epsilon = -(3.0 * df).ln() + (3.0 * kf - 2.0) * ln_n.ln() - ln_n
        + kf * (df * ln_n - (r.value as f64).ln());
    let ln_tau = (12f64.ln() + ln_factorial(k) + kf * kf * std::f64::consts::LN_2 + 3.0 * kf.ln()
        - gamma.ln()
        - ln_n
        - ln_epsilon)
        / (kf - 1.0);
    Ok(Schedule { n, d, k, r, gamma, ln_epsilon, ln_tau })
}

/// [`schedule`] with the r-value drawn from a provider.
pub fn epsilon_tau_schedule(
    p: &Pattern,
    n: u64,
    provider: &dyn RProvider,
    gamma: f64,
) -> Result<Schedule> {
    let r = provider.r_value(p, n)?;
    schedule(n, p.d(), p.k(), r, gamma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaEstimate {
    pub gamma: f64,
    /// `k / (2^{d+1}·w_max)`.
    pub analytic_floor: f64,
    pub measured_min: f64,
    /// `(n, d̄/n)` over the range.
    pub measured: Vec<(u64, f64)>,
}

/// A constant `γ` with `d̄(G_n) ≥ γ·n` on the range.
///
/// When every `n` in the range is at least `2·w_max` the analytic floor is
/// used (capped by the measurements); otherwise the measured minimum.
pub fn estimate_gamma_const(p: &Pattern, range: (u64, u64)) -> Result<GammaEstimate> {
    if range.0 > range.1 || range.0 == 0 {
        return Err(Error::InvalidArgument(format!("empty range {}:{}", range.0, range.1)));
    }
    let p = primitive(p);
    let (d, k) = (p.d(), p.k());
    let w = p.max_width() as u64;
    let measured: Vec<(u64, f64)> = (range.0..=range.1)
        .map(|n| {
            let e = count_copies_closed_form(&p, n) as f64;
            (n, k as f64 * e / (n as f64).powi(d as i32 + 1))
        })
        .collect();
    let measured_min = measured.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    let analytic_floor = k as f64 / (2f64.powi(d as i32 + 1) * w as f64);
    let gamma = if range.0 >= 2 * w {
        analytic_floor.max(0.0).min(measured_min)
    } else {
        measured_min
    };
    Ok(GammaEstimate { gamma, analytic_floor, measured_min, measured })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMode {
    Exact,
    Bounded,
}

impl DeltaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DeltaMode::Exact => "exact",
            DeltaMode::Bounded => "bounded",
        }
    }
}

/// Relative slack on the co-degree comparison; the bounded mode meets it
/// with equality.
pub const DELTA_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Hypotheses {
    pub mode: DeltaMode,
    pub ln_delta: f64,
    /// `ln(ε/(12·k!))`.
    pub ln_delta_target: f64,
    /// `τ < 1/(200·k·k!²)`.
    pub tau_ok: bool,
    /// `Δ ≤ ε/(12·k!)`, up to [`DELTA_TOLERANCE`].
    pub delta_ok: bool,
}

impl Hypotheses {
    pub fn delta(&self) -> f64 {
        self.ln_delta.exp()
    }

    /// `Δ·12·k!/ε`.
    pub fn delta_ratio(&self) -> f64 {
        (self.ln_delta - self.ln_delta_target).exp()
    }
}

/// Both hypotheses of the container corollary. With `summary` the exact
/// `Δ(G,τ)` is used, otherwise the bound `2^{k²}·k³/(τ^{k−1}·γ·n)`.
pub fn check_container_hypotheses(
    s: &Schedule,
    summary: Option<&HypergraphSummary>,
) -> Result<Hypotheses> {
    let (mode, ln_delta) = match summary {
        Some(h) => {
            let cd: Vec<f64> = h.codegrees.iter().map(|&c| c as f64).collect();
            (DeltaMode::Exact, ln_delta_tau(h.k, &cd, h.avg_degree, s.tau())?)
        }
        None => (DeltaMode::Bounded, ln_delta_bounded(s.k, s.ln_tau, s.gamma, s.n)),
    };
    let lnk = ln_factorial(s.k);
    let ln_delta_target = s.ln_epsilon - 12f64.ln() - lnk;
    let ln_tau_cap = -(200f64.ln() + (s.k as f64).ln() + 2.0 * lnk);
    Ok(Hypotheses {
        mode,
        ln_delta,
        ln_delta_target,
        tau_ok: s.ln_tau < ln_tau_cap,
        delta_ok: ln_delta <= ln_delta_target + DELTA_TOLERANCE.ln_1p(),
    })
}

/// One assembled row of the counting bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainerParams {
    pub schedule: Schedule,
    pub hypotheses: Hypotheses,
    pub alpha: f64,
    /// `1000·k·k!³`.
    pub c_cap: f64,
    /// `c·n^d·τ·ln(1/ε)·ln(1/τ)`; negative when `τ > 1` or `ε > 1`.
    pub logc_budget: f64,
    /// `(4/α)·r`.
    pub size_cap: f64,
    /// `max(logC, 0) + size_cap·ln 2`.
    pub total_exponent_budget: f64,
    /// `ln` of the exact number of X-free sets, when known.
    pub true_exponent: Option<f64>,
}

impl ContainerParams {
    pub fn csv_header() -> &'static str {
        "n,k,r_value,r_provenance,gamma,epsilon,tau,delta_mode,delta_value,hyp_tau,hyp_delta,logC_budget,size_cap,total_exponent_budget,true_exponent"
    }

    pub fn to_csv(&self) -> String {
        let s = &self.schedule;
        let h = &self.hypotheses;
        let mut out = String::new();
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.n,
            s.k,
            s.r.value,
            s.r.provenance,
            fmt_float(s.gamma),
            fmt_float(s.epsilon()),
            fmt_float(s.tau()),
            h.mode.as_str(),
            fmt_float(h.delta()),
            h.tau_ok as u8,
            h.delta_ok as u8,
            fmt_float(self.logc_budget),
            fmt_float(self.size_cap),
            fmt_float(self.total_exponent_budget),
            self.true_exponent.map_or("nan".to_string(), fmt_float),
        );
        out
    }

    /// `true_exponent / total_exponent_budget`.
    pub fn budget_ratio(&self) -> Option<f64> {
        self.true_exponent.map(|t| t / self.total_exponent_budget)
    }
}

/// Assembles the container count exponent. `count_ln` is the natural log
/// of an exact count of X-free sets.
pub fn counting_budget(
    s: &Schedule,
    hypotheses: Hypotheses,
    alpha: f64,
    count_ln: Option<f64>,
) -> Result<ContainerParams> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let kf = s.k as f64;
    let fact: u64 = (1..=s.k as u64).product();
    let c_cap = 1000.0 * kf * (fact as f64).powi(3);
    let vertices = (s.n as f64).powi(s.d as i32);
    let logc_budget = c_cap * vertices * s.tau() * (-s.ln_epsilon) * (-s.ln_tau);
    let size_cap = 4.0 / alpha * s.r.value as f64;
    let total = logc_budget.max(0.0) + size_cap * std::f64::consts::LN_2;
    Ok(ContainerParams {
        schedule: s.clone(),
        hypotheses,
        alpha,
        c_cap,
        logc_budget,
        size_cap,
        total_exponent_budget: total,
        true_exponent: count_ln,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copies::codegree_stats;
    use crate::solver::Provenance;

    #[test]
    fn single_edge_toy_is_16() {
        assert_eq!(delta_tau_value(3, &[1.0, 1.0], 1.0, 0.5).unwrap(), 16.0);
    }

    #[test]
    fn homogeneous_and_decreasing() {
        let a = ln_delta_tau(4, &[5.0, 3.0, 1.0], 2.5, 0.3).unwrap();
        let b = ln_delta_tau(4, &[10.0, 6.0, 2.0], 2.5, 0.3).unwrap();
        assert!((b - a - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(ln_delta_tau(4, &[5.0, 3.0, 1.0], 2.5, 0.31).unwrap() < a);
        assert!(ln_delta_tau(3, &[1.0, 1.0], 0.0, 0.5).is_err());
    }

    #[test]
    fn bounded_mode_meets_the_target() {
        let r = RValue::user(1000);
        let s = schedule(10_000, 1, 3, r, 1.0).unwrap();
        let h = check_container_hypotheses(&s, None).unwrap();
        assert!((h.delta_ratio() - 1.0).abs() < 1e-9);
        assert!(h.delta_ok);
    }

    #[test]
    fn degenerate_r_epsilon() {
        let n = 1000u64;
        let s = schedule(n, 1, 3, RValue::user(n), 1.0).unwrap();
        let ln_n = (n as f64).ln();
        let want = ln_n.powi(7) / (3.0 * n as f64);
        assert!((s.epsilon() / want - 1.0).abs() < 1e-12);
        let s2 = schedule(n, 1, 3, RValue::user(n / 2), 1.0).unwrap();
        assert!(s2.epsilon() > s.epsilon());
    }

    #[test]
    fn small_n_tau_fails_the_first_hypothesis() {
        let s = schedule(10, 1, 3, RValue::exact(5, Provenance::Exhaustive), 0.375).unwrap();
        assert!(s.tau() >= 0.5);
        assert!(!check_container_hypotheses(&s, None).unwrap().tau_ok);
    }

    #[test]
    fn gamma_floor() {
        let g = estimate_gamma_const(&Pattern::progression(3), (10, 100)).unwrap();
        assert_eq!(g.analytic_floor, 0.375);
        assert!(g.measured_min >= g.analytic_floor);
        assert_eq!(g.gamma, 0.375);
        let c = estimate_gamma_const(&Pattern::corner(2), (2, 30)).unwrap();
        assert_eq!(c.analytic_floor, 0.375);
        assert!(c.measured_min >= c.analytic_floor);
        let one = estimate_gamma_const(&Pattern::progression(3), (3, 3)).unwrap();
        assert_eq!(one.gamma, 1.0 / 3.0);
        assert!(estimate_gamma_const(&Pattern::progression(3), (5, 4)).is_err());
    }

    #[test]
    fn exact_mode_below_bound() {
        let p = Pattern::progression(3);
        let h = codegree_stats(&p, 30).unwrap();
        let s = schedule(30, 1, 3, RValue::user(12), 0.375).unwrap();
        let exact = check_container_hypotheses(&s, Some(&h)).unwrap();
        let bounded = check_container_hypotheses(&s, None).unwrap();
        assert_eq!(exact.mode, DeltaMode::Exact);
        assert!(exact.ln_delta <= bounded.ln_delta);
    }

    #[test]
    fn budget_exceeds_small_counts() {
        let s = schedule(4, 1, 3, RValue::exact(3, Provenance::Exhaustive), 0.375).unwrap();
        let h = check_container_hypotheses(&s, None).unwrap();
        let b = counting_budget(&s, h, 0.5, Some(13f64.ln())).unwrap();
        assert!(b.total_exponent_budget > 13f64.ln());
        assert_eq!(b.c_cap, 1000.0 * 3.0 * 216.0);
        assert_eq!(b.to_csv().split(',').count(), 15);
    }
}
