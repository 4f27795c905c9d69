//! Exact and heuristic values of `r_X(n)`, and exact counts of X-free sets.
//!
//! X-free subsets of `[n]^d` are the independent sets of the copies
//! hypergraph. The exact solver searches for a minimum hitting set of the
//! hyperedges: every uncovered copy must lose one of its points, and a
//! greedy family of copies with pairwise disjoint free points bounds how
//! many more points must go.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::copies::{primitive, CopyHypergraph};
use crate::error::{Error, Result};
use crate::grid::{vertex_count, GridSet};
use crate::pattern::Pattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Exhaustive,
    BranchAndBound,
    Greedy,
    Behrend,
    User,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Exhaustive => "exhaustive",
            Provenance::BranchAndBound => "branch-and-bound",
            Provenance::Greedy => "greedy",
            Provenance::Behrend => "behrend",
            Provenance::User => "user",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exhaustive" => Provenance::Exhaustive,
            "branch-and-bound" => Provenance::BranchAndBound,
            "greedy" => Provenance::Greedy,
            "behrend" => Provenance::Behrend,
            "user" => Provenance::User,
            _ => return Err(Error::InvalidArgument(format!("unknown provenance {s:?}"))),
        })
    }
}

/// What is known about `r_X(n)` for one pattern and side length.
#[derive(Debug, Clone, PartialEq)]
pub struct RNumberRecord {
    pub pattern_id: String,
    pub n: u64,
    pub d: usize,
    pub lower: u64,
    pub upper: u64,
    pub exact: bool,
    pub witness: Option<GridSet>,
    pub provenance: Provenance,
}

impl RNumberRecord {
    /// The exact value, if known.
    pub fn value(&self) -> Option<u64> {
        self.exact.then_some(self.lower)
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Search-node limit; exceeding it yields an inexact record.
    pub node_budget: u64,
    pub workers: usize,
    pub vertex_cap: u64,
    pub edge_cap: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { node_budget: 50_000_000, workers: 1, vertex_cap: 4096, edge_cap: 2_000_000 }
    }
}

const FREE: u8 = 0;
const KEPT: u8 = 1;
const REMOVED: u8 = 2;

/// Search state for the hitting-set formulation.
#[derive(Clone)]
struct State<'a> {
    h: &'a CopyHypergraph,
    inc: &'a [Vec<u32>],
    status: Vec<u8>,
    hit: Vec<u8>,
    kept: Vec<u8>,
    removed: usize,
    // scratch for the packing bound
    mark: Vec<u32>,
    epoch: u32,
}

impl<'a> State<'a> {
    fn new(h: &'a CopyHypergraph, inc: &'a [Vec<u32>]) -> Self {
        let e = h.edge_count();
        State {
            h,
            inc,
            status: vec![FREE; h.vertices],
            hit: vec![0; e],
            kept: vec![0; e],
            removed: 0,
            mark: vec![0; h.vertices],
            epoch: 0,
        }
    }

    fn remove(&mut self, v: u32) {
        self.status[v as usize] = REMOVED;
        self.removed += 1;
        for &e in &self.inc[v as usize] {
            self.hit[e as usize] += 1;
        }
    }

    fn unremove(&mut self, v: u32) {
        self.status[v as usize] = FREE;
        self.removed -= 1;
        for &e in &self.inc[v as usize] {
            self.hit[e as usize] -= 1;
        }
    }

    /// Returns false if keeping `v` completes a copy.
    fn keep(&mut self, v: u32) -> bool {
        self.status[v as usize] = KEPT;
        let k = self.h.k as u8;
        let mut ok = true;
        for &e in &self.inc[v as usize] {
            self.kept[e as usize] += 1;
            if self.kept[e as usize] == k {
                ok = false;
            }
        }
        ok
    }

    fn unkeep(&mut self, v: u32) {
        self.status[v as usize] = FREE;
        for &e in &self.inc[v as usize] {
            self.kept[e as usize] -= 1;
        }
    }

    /// Vertices that still may end up in the set.
    fn alive(&self) -> usize {
        self.h.vertices - self.removed
    }

    /// Greedy packing of uncovered copies with disjoint free points, taken
    /// in order of increasing free count. Returns the packing size and the
    /// uncovered copy with fewest free points (first in stream order).
    fn bound_and_branch(&mut self) -> (usize, Option<usize>) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        let k = self.h.k;
        let mut packing = 0;
        let mut branch: Option<(usize, usize)> = None;
        for want in 1..=k {
            for e in 0..self.h.edge_count() {
                if self.hit[e] != 0 {
                    continue;
                }
                let free = k - self.kept[e] as usize;
                if free != want {
                    continue;
                }
                if branch.is_none() {
                    branch = Some((e, free));
                }
                let edge = self.h.edge(e);
                let disjoint = edge.iter().all(|&v| {
                    self.status[v as usize] != FREE || self.mark[v as usize] != self.epoch
                });
                if disjoint {
                    for &v in edge {
                        if self.status[v as usize] == FREE {
                            self.mark[v as usize] = self.epoch;
                        }
                    }
                    packing += 1;
                }
            }
        }
        (packing, branch.map(|(e, _)| e))
    }

    fn witness(&self) -> Vec<u32> {
        (0..self.h.vertices as u32).filter(|&v| self.status[v as usize] != REMOVED).collect()
    }
}

/// Shared between tasks of one solve.
struct Shared {
    best: AtomicUsize,
    nodes: AtomicU64,
    budget: u64,
    exhausted: AtomicBool,
}

struct Local {
    best: usize,
    witness: Option<Vec<u32>>,
}

fn search(st: &mut State<'_>, shared: &Shared, local: &mut Local) {
    if shared.exhausted.load(Ordering::Relaxed) {
        return;
    }
    if shared.nodes.fetch_add(1, Ordering::Relaxed) >= shared.budget {
        shared.exhausted.store(true, Ordering::Relaxed);
        return;
    }
    let (packing, branch) = st.bound_and_branch();
    let Some(e) = branch else {
        let size = st.alive();
        if size > local.best {
            local.best = size;
            local.witness = Some(st.witness());
            shared.best.fetch_max(size, Ordering::Relaxed);
        }
        return;
    };
    let ub = st.alive() - packing;
    // ties with another task's incumbent are still explored so every task
    // reports the first optimum in its own DFS order
    if ub <= local.best || ub < shared.best.load(Ordering::Relaxed) {
        return;
    }
    let free: Vec<u32> =
        st.h.edge(e).iter().copied().filter(|&v| st.status[v as usize] == FREE).collect();
    let mut kept_so_far = Vec::new();
    for &v in &free {
        st.remove(v);
        search(st, shared, local);
        st.unremove(v);
        let ok = st.keep(v);
        kept_so_far.push(v);
        if !ok {
            break;
        }
    }
    for v in kept_so_far.into_iter().rev() {
        st.unkeep(v);
    }
}

/// A partial assignment handed to one worker.
#[derive(Clone)]
struct Task {
    removed: Vec<u32>,
    kept: Vec<u32>,
}

/// Expands the top of the search tree breadth-first (in DFS sibling order)
/// until there are enough tasks to spread across workers.
fn split_tasks(h: &CopyHypergraph, inc: &[Vec<u32>], target: usize) -> Vec<Task> {
    let mut frontier = vec![Task { removed: vec![], kept: vec![] }];
    for _ in 0..3 {
        if frontier.len() >= target {
            break;
        }
        let mut next = Vec::new();
        for t in frontier {
            let mut st = State::new(h, inc);
            let mut feasible = true;
            for &v in &t.removed {
                st.remove(v);
            }
            for &v in &t.kept {
                feasible &= st.keep(v);
            }
            if !feasible {
                continue;
            }
            let (_, branch) = st.bound_and_branch();
            let Some(e) = branch else {
                next.push(t);
                continue;
            };
            let free: Vec<u32> =
                h.edge(e).iter().copied().filter(|&v| st.status[v as usize] == FREE).collect();
            for (i, &v) in free.iter().enumerate() {
                let mut child = t.clone();
                child.removed.push(v);
                child.kept.extend_from_slice(&free[..i]);
                next.push(child);
            }
        }
        frontier = next;
    }
    frontier
}

/// Exact `r_X(n)` by branch and bound over the copies hypergraph.
///
/// Returns `Err(Budget)` when the hypergraph exceeds the caps, and an
/// inexact record when the node budget runs out.
pub fn solve_rx_exact(p: &Pattern, n: u64, opts: &SolveOptions) -> Result<RNumberRecord> {
    let p = primitive(p);
    let pattern_id = p.hash_id();
    let h = CopyHypergraph::build(&p, n, opts.vertex_cap, opts.edge_cap)?;
    let v = h.vertices;
    let inc = h.incidence();

    let greedy = greedy_on_hypergraph(&h, &inc, 0);
    let root_upper = {
        let mut st = State::new(&h, &inc);
        let (packing, _) = st.bound_and_branch();
        v - packing
    };

    let shared = Shared {
        best: AtomicUsize::new(greedy.len()),
        nodes: AtomicU64::new(0),
        budget: opts.node_budget,
        exhausted: AtomicBool::new(false),
    };
    let workers = opts.workers.max(1);
    let tasks = split_tasks(&h, &inc, 16);
    let run = |t: &Task| -> Local {
        let mut st = State::new(&h, &inc);
        let mut local = Local { best: 0, witness: None };
        for &x in &t.removed {
            st.remove(x);
        }
        let mut feasible = true;
        for &x in &t.kept {
            feasible &= st.keep(x);
        }
        if feasible {
            search(&mut st, &shared, &mut local);
        }
        local
    };
    let results: Vec<Local> = if workers == 1 {
        tasks.iter().map(run).collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(run).collect())
    };

    // first task in split order holding the maximum wins, whatever the schedule
    let mut best_size = 0;
    let mut best_witness = None;
    for r in results {
        if r.witness.is_some() && r.best > best_size {
            best_size = r.best;
            best_witness = r.witness;
        }
    }
    if best_size < greedy.len() {
        best_size = greedy.len();
        best_witness = Some(greedy);
    }
    let exact = !shared.exhausted.load(Ordering::Relaxed);
    let witness = best_witness.map(|w| to_gridset(&h, &w));
    let lower = best_size as u64;
    Ok(RNumberRecord {
        pattern_id,
        n,
        d: h.d,
        lower,
        upper: if exact { lower } else { root_upper.max(best_size) as u64 },
        exact,
        witness,
        provenance: Provenance::BranchAndBound,
    })
}

fn to_gridset(h: &CopyHypergraph, members: &[u32]) -> GridSet {
    let mut g = GridSet::empty(h.n, h.d).expect("hypergraph grid fits");
    for &v in members {
        g.insert_index(v as usize);
    }
    g
}

/// Random insertion order on the hypergraph; keeps a vertex unless it
/// completes a copy.
fn greedy_on_hypergraph(h: &CopyHypergraph, inc: &[Vec<u32>], seed: u64) -> Vec<u32> {
    let mut order: Vec<u32> = (0..h.vertices as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut inside = vec![false; h.vertices];
    for &v in &order {
        let completes = inc[v as usize]
            .iter()
            .any(|&e| h.edge(e as usize).iter().all(|&u| u == v || inside[u as usize]));
        if !completes {
            inside[v as usize] = true;
        }
    }
    (0..h.vertices as u32).filter(|&v| inside[v as usize]).collect()
}

/// True if adding `idx` to `set` would complete a copy of `p` through it.
fn completes_copy(set: &GridSet, p: &Pattern, idx: usize) -> bool {
    let v = set.point_of(idx);
    let n = set.n() as i64;
    let w = p.max_width();
    let mut cand = vec![0i64; p.d()];
    for (j, xj) in p.points().iter().enumerate() {
        for r in 1..=((n - 1) / w) {
            let base: Vec<i64> = v.iter().zip(xj).map(|(vi, xi)| vi - r * xi).collect();
            let ok = p.points().iter().enumerate().all(|(m, x)| {
                if m == j {
                    return true;
                }
                for i in 0..p.d() {
                    cand[i] = base[i] + r * x[i];
                }
                set.contains(&cand)
            });
            if ok {
                return true;
            }
        }
    }
    false
}

/// Randomized greedy lower bound, deterministic in `seed`.
pub fn greedy_lower_bound(p: &Pattern, n: u64, seed: u64) -> Result<RNumberRecord> {
    let p = primitive(p);
    let mut set = GridSet::empty(n, p.d())?;
    let mut order: Vec<usize> = (0..set.vertex_count() as usize).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    for idx in order {
        if !completes_copy(&set, &p, idx) {
            set.insert_index(idx);
        }
    }
    let lower = set.len() as u64;
    Ok(RNumberRecord {
        pattern_id: p.hash_id(),
        n,
        d: p.d(),
        lower,
        upper: set.vertex_count(),
        exact: lower == set.vertex_count(),
        witness: Some(set),
        provenance: Provenance::Greedy,
    })
}

/// Exact number of X-free subsets of `[n]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord {
    pub pattern_id: String,
    pub n: u64,
    pub count: BigUint,
    pub log2_count: f64,
    /// `log2(count) / r_X(n)` when the exact extremal value is known.
    pub ratio: Option<f64>,
}

impl CountRecord {
    pub fn count_decimal(&self) -> String {
        self.count.to_str_radix(10)
    }

    /// Attaches the ratio against an exact `r_X(n)`.
    pub fn with_rx(mut self, r: &RNumberRecord) -> Self {
        self.ratio = r.value().filter(|&v| v > 0).map(|v| self.log2_count / v as f64);
        self
    }
}

#[derive(Debug, Clone)]
pub struct CountOptions {
    pub vertex_cap: u64,
    pub node_budget: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { vertex_cap: 36, node_budget: 2_000_000_000 }
    }
}

struct Counter<'a> {
    h: &'a CopyHypergraph,
    inc: &'a [Vec<u32>],
    /// Edges whose largest vertex is the key.
    closing: Vec<Vec<u32>>,
    included: Vec<bool>,
    excluded_in: Vec<u32>,
    alive_future: usize,
    nodes: u64,
    budget: u64,
    total: BigUint,
}

impl Counter<'_> {
    fn add_pow2(&mut self, e: usize) {
        self.total += BigUint::one() << e;
    }

    fn run(&mut self, i: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget { what: "counting nodes", cap: self.budget });
        }
        let v = self.h.vertices;
        if self.alive_future == 0 {
            // no remaining copy can be completed: every completion is free
            self.add_pow2(v - i);
            return Ok(());
        }
        if i == v {
            self.add_pow2(0);
            return Ok(());
        }
        // edges closing at i that are still alive drop out of the future
        let leaving = |c: &Self| {
            c.closing[i].iter().filter(|&&e| c.excluded_in[e as usize] == 0).count()
        };

        // include i
        let blocked = self.closing[i].iter().any(|&e| {
            self.h.edge(e as usize).iter().all(|&u| u as usize == i || self.included[u as usize])
        });
        if !blocked {
            self.included[i] = true;
            let drop = leaving(self);
            self.alive_future -= drop;
            let r = self.run(i + 1);
            self.alive_future += drop;
            self.included[i] = false;
            r?;
        }

        // exclude i
        let mut killed = 0;
        for &e in &self.inc[i] {
            if self.excluded_in[e as usize] == 0 {
                killed += 1;
            }
            self.excluded_in[e as usize] += 1;
        }
        self.alive_future -= killed;
        let drop = leaving(self);
        self.alive_future -= drop;
        let r = self.run(i + 1);
        self.alive_future += drop + killed;
        for &e in &self.inc[i] {
            self.excluded_in[e as usize] -= 1;
        }
        r
    }
}

/// Counts independent sets of the copies hypergraph (the empty set
/// included) by backtracking over vertices in index order.
pub fn count_xfree_subsets(p: &Pattern, n: u64, opts: &CountOptions) -> Result<CountRecord> {
    let p = primitive(p);
    let v = vertex_count(n, p.d()).unwrap_or(u64::MAX);
    if v > opts.vertex_cap {
        return Err(Error::Budget { what: "counting vertices n^d", cap: opts.vertex_cap });
    }
    let h = CopyHypergraph::build(&p, n, opts.vertex_cap, u64::MAX)?;
    let inc = h.incidence();
    let mut closing = vec![Vec::new(); h.vertices];
    for (e, edge) in h.edges().enumerate() {
        let m = *edge.iter().max().unwrap();
        closing[m as usize].push(e as u32);
    }
    let mut c = Counter {
        h: &h,
        inc: &inc,
        closing,
        included: vec![false; h.vertices],
        excluded_in: vec![0; h.edge_count()],
        alive_future: h.edge_count(),
        nodes: 0,
        budget: opts.node_budget,
        total: BigUint::zero(),
    };
    c.run(0)?;
    let count = c.total;
    let log2_count = big_log2(&count);
    Ok(CountRecord { pattern_id: p.hash_id(), n, count, log2_count, ratio: None })
}

/// `log2` of a big integer, exact for powers of two.
pub fn big_log2(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.log2() + shift as f64
}

/// True iff `|a| = claimed` and `a` is X-free.
pub fn verify_witness(a: &GridSet, p: &Pattern, claimed: u64) -> bool {
    a.len() as u64 == claimed && crate::copies::is_x_free(a, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ap3() -> Pattern {
        Pattern::progression(3)
    }

    #[test]
    fn solver_spot_values() {
        let o = SolveOptions::default();
        let r8 = solve_rx_exact(&ap3(), 8, &o).unwrap();
        assert!(r8.exact);
        assert_eq!(r8.value(), Some(4));
        assert!(verify_witness(r8.witness.as_ref().unwrap(), &ap3(), 4));
        assert_eq!(solve_rx_exact(&ap3(), 9, &o).unwrap().value(), Some(5));
        assert_eq!(solve_rx_exact(&ap3(), 1, &o).unwrap().value(), Some(1));

        let c = solve_rx_exact(&Pattern::corner(2), 2, &o).unwrap();
        assert_eq!(c.value(), Some(3));
        let w = c.witness.unwrap();
        assert_eq!(w.len(), 3);
        assert!(!w.contains(&[1, 1]) || !w.contains(&[2, 1]) || !w.contains(&[1, 2]));
    }

    #[test]
    fn budget_exhaustion_gives_bounds() {
        let o = SolveOptions { node_budget: 3, ..Default::default() };
        let r = solve_rx_exact(&ap3(), 20, &o).unwrap();
        assert!(!r.exact);
        assert!(r.lower <= r.upper && r.upper <= 20);
        assert!(verify_witness(r.witness.as_ref().unwrap(), &ap3(), r.lower));
    }

    #[test]
    fn cap_exceeded_is_an_error() {
        let o = SolveOptions { vertex_cap: 10, ..Default::default() };
        assert!(matches!(solve_rx_exact(&ap3(), 11, &o), Err(Error::Budget { .. })));
    }

    #[test]
    fn greedy_contracts() {
        for seed in 0..20 {
            let g = greedy_lower_bound(&ap3(), 8, seed).unwrap();
            assert!(g.lower >= 1);
            assert!(verify_witness(g.witness.as_ref().unwrap(), &ap3(), g.lower));
            assert_eq!(g.upper, 8);
            let c = greedy_lower_bound(&Pattern::corner(2), 2, seed).unwrap();
            assert_eq!(c.lower, 3);
        }
        assert_eq!(greedy_lower_bound(&ap3(), 1, 7).unwrap().lower, 1);
        let a = greedy_lower_bound(&ap3(), 30, 11).unwrap();
        let b = greedy_lower_bound(&ap3(), 30, 11).unwrap();
        assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn count_spot_values() {
        let o = CountOptions::default();
        let c = |p: &Pattern, n| count_xfree_subsets(p, n, &o).unwrap().count_decimal();
        assert_eq!(c(&ap3(), 3), "7");
        assert_eq!(c(&ap3(), 4), "13");
        assert_eq!(c(&Pattern::corner(2), 2), "14");
        assert_eq!(c(&ap3(), 1), "2");
        assert_eq!(c(&Pattern::corner(2), 1), "2");
    }

    #[test]
    fn count_cap_and_budget() {
        let o = CountOptions::default();
        assert!(matches!(count_xfree_subsets(&ap3(), 37, &o), Err(Error::Budget { .. })));
        let o = CountOptions { node_budget: 5, ..Default::default() };
        assert!(matches!(count_xfree_subsets(&ap3(), 12, &o), Err(Error::Budget { .. })));
    }

    #[test]
    fn witness_checks() {
        let a = GridSet::from_points(5, 1, [[1], [2], [4], [5]]).unwrap();
        assert!(verify_witness(&a, &ap3(), 4));
        assert!(!verify_witness(&a, &ap3(), 3));
        assert!(!verify_witness(&GridSet::full(4, 1).unwrap(), &ap3(), 4));
        assert!(verify_witness(&GridSet::empty(4, 1).unwrap(), &ap3(), 0));
    }

    #[test]
    fn log2_of_big_counts() {
        assert_eq!(big_log2(&BigUint::from(1024u32)), 10.0);
        let huge = BigUint::one() << 3000u32;
        assert_eq!(big_log2(&huge), 3000.0);
    }
}
