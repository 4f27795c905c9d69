//! Non-trivial copies `b + r·X` of a pattern inside `[n]^d`.
//!
//! Against a primitive pattern, every copy whose points are lattice points
//! has an integer ratio, so the copy family of `X` in `[n]^d` is exactly the
//! set of integer placements `(b, r)` with `r ≥ 1` and `b + r·x ∈ [n]^d` for
//! all `x ∈ X`. Functions here accept any pattern and work against its
//! primitive form; placements are always expressed relative to that form.

use std::collections::HashMap;
use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{vertex_count, GridSet};
use crate::pattern::Pattern;

/// One non-trivial copy `b + r·X`, `b` 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CopyPlacement {
    pub ratio: i64,
    pub base: Vec<i64>,
}

impl CopyPlacement {
    /// The copy's points, in pattern order.
    pub fn points(&self, p: &Pattern) -> Vec<Vec<i64>> {
        p.points()
            .iter()
            .map(|x| x.iter().zip(&self.base).map(|(xi, bi)| bi + self.ratio * xi).collect())
            .collect()
    }
}

pub(crate) fn primitive(p: &Pattern) -> std::borrow::Cow<'_, Pattern> {
    if p.is_primitive() {
        std::borrow::Cow::Borrowed(p)
    } else {
        std::borrow::Cow::Owned(p.normalize())
    }
}

/// Streams every copy of `p` in `[n]^d`, ordered by ratio then
/// lexicographically by base point.
pub fn enumerate_copies(p: &Pattern, n: u64) -> CopyIter {
    let p = primitive(p).into_owned();
    let mut it = CopyIter { widths: p.widths().to_vec(), n: n as i64, ratio: 0, base: None };
    it.advance_ratio();
    it
}

pub struct CopyIter {
    widths: Vec<i64>,
    n: i64,
    ratio: i64,
    base: Option<Vec<i64>>,
}

impl CopyIter {
    fn limit(&self, i: usize) -> i64 {
        self.n - self.ratio * self.widths[i]
    }

    fn advance_ratio(&mut self) {
        self.ratio += 1;
        let d = self.widths.len();
        if (0..d).all(|i| self.limit(i) >= 1) {
            self.base = Some(vec![1; d]);
        } else {
            // widths are non-negative and one is positive: larger ratios fit no better
            self.base = None;
        }
    }
}

impl Iterator for CopyIter {
    type Item = CopyPlacement;

    fn next(&mut self) -> Option<CopyPlacement> {
        let current = self.base.clone()?;
        let out = CopyPlacement { ratio: self.ratio, base: current };
        let d = self.widths.len();
        let mut bumped = false;
        for i in (0..d).rev() {
            let lim = self.limit(i);
            let base = self.base.as_mut().unwrap();
            if base[i] < lim {
                base[i] += 1;
                for b in base.iter_mut().skip(i + 1) {
                    *b = 1;
                }
                bumped = true;
                break;
            }
        }
        if !bumped {
            self.advance_ratio();
        }
        Some(out)
    }
}

/// `Σ_{r≥1} Π_i max(0, n − r·w_i)`.
pub fn count_copies_closed_form(p: &Pattern, n: u64) -> u128 {
    let p = primitive(p);
    let w_max = p.max_width() as u64;
    if w_max == 0 || n <= w_max {
        return 0;
    }
    (1..=(n - 1) / w_max)
        .map(|r| {
            p.widths()
                .iter()
                .map(|&w| (n as i128 - r as i128 * w as i128).max(0) as u128)
                .product::<u128>()
        })
        .sum()
}

/// Linear index offsets `r·idx(x)` of the pattern points for ratio `r`.
fn offsets(p: &Pattern, n: u64, r: i64) -> Vec<usize> {
    p.points()
        .iter()
        .map(|x| {
            let mut stride = 1usize;
            let mut off = 0usize;
            for &c in x {
                off += (r * c) as usize * stride;
                stride *= n as usize;
            }
            off
        })
        .collect()
}

/// Calls `f(base_index)` for every valid base of ratio `r`.
fn for_each_base<B>(
    p: &Pattern,
    n: u64,
    r: i64,
    mut f: impl FnMut(usize) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let d = p.d();
    let limits: Vec<i64> = p.widths().iter().map(|&w| n as i64 - r * w).collect();
    if limits.iter().any(|&l| l < 1) {
        return ControlFlow::Continue(());
    }
    let strides: Vec<usize> = (0..d).map(|i| (n as usize).pow(i as u32)).collect();
    let mut digits = vec![0i64; d];
    let mut idx = 0usize;
    loop {
        f(idx)?;
        let mut i = 0;
        loop {
            if i == d {
                return ControlFlow::Continue(());
            }
            if digits[i] + 1 < limits[i] {
                digits[i] += 1;
                idx += strides[i];
                break;
            }
            idx -= digits[i] as usize * strides[i];
            digits[i] = 0;
            i += 1;
        }
    }
}

/// How `gamma_count` looks for copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaStrategy {
    /// Test every placement in the grid.
    Scan,
    /// Anchor the first two pattern points on pairs of members.
    Anchored,
    /// Pick whichever visits fewer candidates.
    Auto,
}

/// `Γ_X(A)`: the number of non-trivial copies of `p` inside `a`.
pub fn gamma_count(a: &GridSet, p: &Pattern) -> u128 {
    gamma_count_with(a, p, GammaStrategy::Auto, false)
}

/// True iff `a` contains no non-trivial copy of `p`.
pub fn is_x_free(a: &GridSet, p: &Pattern) -> bool {
    gamma_count_with(a, p, GammaStrategy::Auto, true) == 0
}

/// `gamma_count` with an explicit strategy; with `early_exit` the result is
/// capped at 1.
pub fn gamma_count_with(
    a: &GridSet,
    p: &Pattern,
    strategy: GammaStrategy,
    early_exit: bool,
) -> u128 {
    let p = primitive(p);
    assert_eq!(p.d(), a.d(), "pattern and grid dimensions differ");
    if a.len() < p.k() {
        return 0;
    }
    let strategy = match strategy {
        GammaStrategy::Auto => {
            let pairs = (a.len() as u128).pow(2);
            if pairs < count_copies_closed_form(&p, a.n()) {
                GammaStrategy::Anchored
            } else {
                GammaStrategy::Scan
            }
        }
        s => s,
    };
    match strategy {
        GammaStrategy::Anchored => gamma_anchored(a, &p, early_exit),
        _ => gamma_scan(a, &p, early_exit),
    }
}

fn gamma_scan(a: &GridSet, p: &Pattern, early_exit: bool) -> u128 {
    let n = a.n();
    let w_max = p.max_width() as u64;
    if n <= w_max {
        return 0;
    }
    let r_max = ((n - 1) / w_max) as i64;
    let count_ratio = |r: i64| -> u128 {
        let offs = offsets(p, n, r);
        let mut count = 0u128;
        let _ = for_each_base(p, n, r, |b| {
            if offs.iter().all(|&o| a.contains_index(b + o)) {
                count += 1;
                if early_exit {
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        });
        count
    };
    if early_exit {
        for r in 1..=r_max {
            if count_ratio(r) > 0 {
                return 1;
            }
        }
        0
    } else {
        // partition by ratio; the reduction is a sum so worker count is irrelevant
        (1..=r_max).into_par_iter().map(count_ratio).sum()
    }
}

fn gamma_anchored(a: &GridSet, p: &Pattern, early_exit: bool) -> u128 {
    let pts: Vec<Vec<i64>> = a.indices().map(|i| a.point_of(i)).collect();
    let x0 = &p.points()[0];
    let x1 = &p.points()[1];
    let diff: Vec<i64> = x1.iter().zip(x0).map(|(a, b)| a - b).collect();
    let j = diff.iter().position(|&c| c != 0).expect("distinct points");
    let rest = &p.points()[2..];
    let mut count = 0u128;
    let mut cand = vec![0i64; p.d()];
    for u in &pts {
        for v in &pts {
            let delta = v[j] - u[j];
            if delta % diff[j] != 0 {
                continue;
            }
            let r = delta / diff[j];
            if r <= 0 {
                continue;
            }
            if !(0..p.d()).all(|i| v[i] - u[i] == r * diff[i]) {
                continue;
            }
            let hit = rest.iter().all(|x| {
                for i in 0..p.d() {
                    cand[i] = u[i] + r * (x[i] - x0[i]);
                }
                a.contains(&cand)
            });
            if hit {
                count += 1;
                if early_exit {
                    return 1;
                }
            }
        }
    }
    count
}

/// The copies hypergraph on `[n]^d`, edges in stream order.
#[derive(Debug, Clone)]
pub struct CopyHypergraph {
    pub n: u64,
    pub d: usize,
    pub k: usize,
    pub vertices: usize,
    edges: Vec<u32>,
}

impl CopyHypergraph {
    /// Materializes all copies, failing if `n^d` or `|E|` exceed the caps.
    pub fn build(p: &Pattern, n: u64, vertex_cap: u64, edge_cap: u64) -> Result<Self> {
        let p = primitive(p);
        let v = vertex_count(n, p.d())
            .filter(|&v| v <= vertex_cap && v < u32::MAX as u64)
            .ok_or(Error::Budget { what: "copies hypergraph vertices n^d", cap: vertex_cap })?;
        let e = count_copies_closed_form(&p, n);
        if e > edge_cap as u128 {
            return Err(Error::Budget { what: "copies hypergraph edges", cap: edge_cap });
        }
        let k = p.k();
        let mut edges = Vec::with_capacity(e as usize * k);
        let w_max = p.max_width() as u64;
        if n > w_max {
            for r in 1..=((n - 1) / w_max) as i64 {
                let offs = offsets(&p, n, r);
                let _ = for_each_base::<()>(&p, n, r, |b| {
                    edges.extend(offs.iter().map(|&o| (b + o) as u32));
                    ControlFlow::Continue(())
                });
            }
        }
        Ok(CopyHypergraph { n, d: p.d(), k, vertices: v as usize, edges })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len() / self.k
    }

    pub fn edge(&self, e: usize) -> &[u32] {
        &self.edges[e * self.k..(e + 1) * self.k]
    }

    pub fn edges(&self) -> impl Iterator<Item = &[u32]> {
        self.edges.chunks_exact(self.k)
    }

    /// For each vertex, the edges that contain it.
    pub fn incidence(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.vertices];
        for (e, edge) in self.edges().enumerate() {
            for &v in edge {
                inc[v as usize].push(e as u32);
            }
        }
        inc
    }
}

/// Degree statistics of the copies hypergraph.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergraphSummary {
    pub n: u64,
    pub d: usize,
    pub k: usize,
    pub edge_count: u64,
    pub vertex_count: u64,
    /// `k·|E| / n^d`.
    pub avg_degree: f64,
    /// `codegrees[j − 2]` is `Δ_j` for `j = 2..=k`.
    pub codegrees: Vec<u64>,
    /// `avg_degree / n`.
    pub gamma_estimate: f64,
}

impl HypergraphSummary {
    pub fn codegree(&self, j: usize) -> u64 {
        self.codegrees[j - 2]
    }
}

/// Default cap on `n^d` for co-degree scans.
pub const CODEGREE_VERTEX_CAP: u64 = 1_000_000;
/// Default cap on `|E|` for co-degree scans.
pub const CODEGREE_EDGE_CAP: u64 = 5_000_000;

/// Exact co-degrees `Δ_2..Δ_k` by aggregating all `j`-subsets of every edge.
pub fn codegree_stats(p: &Pattern, n: u64) -> Result<HypergraphSummary> {
    codegree_stats_capped(p, n, CODEGREE_VERTEX_CAP, CODEGREE_EDGE_CAP)
}

pub fn codegree_stats_capped(
    p: &Pattern,
    n: u64,
    vertex_cap: u64,
    edge_cap: u64,
) -> Result<HypergraphSummary> {
    let h = CopyHypergraph::build(p, n, vertex_cap, edge_cap)?;
    let k = h.k;
    if k > 8 {
        return Err(Error::InvalidArgument("co-degree scan supports |X| <= 8".into()));
    }
    let mut codegrees = Vec::with_capacity(k - 1);
    for j in 2..=k {
        let mut acc: HashMap<[u32; 8], u64> = HashMap::new();
        let subsets = index_subsets(k, j);
        for edge in h.edges() {
            let mut sorted = [0u32; 8];
            sorted[..k].copy_from_slice(edge);
            sorted[..k].sort_unstable();
            for s in &subsets {
                let mut key = [u32::MAX; 8];
                for (slot, &i) in s.iter().enumerate() {
                    key[slot] = sorted[i];
                }
                *acc.entry(key).or_insert(0) += 1;
            }
        }
        codegrees.push(acc.values().copied().max().unwrap_or(0));
    }
    let edge_count = h.edge_count() as u64;
    let vertex_count = h.vertices as u64;
    let avg_degree = k as f64 * edge_count as f64 / vertex_count as f64;
    Ok(HypergraphSummary {
        n,
        d: h.d,
        k,
        edge_count,
        vertex_count,
        avg_degree,
        codegrees,
        gamma_estimate: avg_degree / n as f64,
    })
}

fn index_subsets(k: usize, j: usize) -> Vec<Vec<usize>> {
    (0u32..1 << k)
        .filter(|m| m.count_ones() as usize == j)
        .map(|m| (0..k).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ap3() -> Pattern {
        Pattern::progression(3)
    }

    fn set1(n: u64, xs: &[i64]) -> GridSet {
        GridSet::from_points(n, 1, xs.iter().map(|&x| [x])).unwrap()
    }

    #[test]
    fn enumerate_ap3_n5() {
        let got: Vec<_> = enumerate_copies(&ap3(), 5).collect();
        let want = vec![
            CopyPlacement { ratio: 1, base: vec![1] },
            CopyPlacement { ratio: 1, base: vec![2] },
            CopyPlacement { ratio: 1, base: vec![3] },
            CopyPlacement { ratio: 2, base: vec![1] },
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn enumerate_corner_n3_and_empty_cases() {
        let got: Vec<_> = enumerate_copies(&Pattern::corner(2), 3).collect();
        assert_eq!(got.len(), 5);
        assert_eq!(got[0], CopyPlacement { ratio: 1, base: vec![1, 1] });
        assert_eq!(got[1], CopyPlacement { ratio: 1, base: vec![1, 2] });
        assert_eq!(got[4], CopyPlacement { ratio: 2, base: vec![1, 1] });
        assert_eq!(enumerate_copies(&ap3(), 2).count(), 0);
        assert_eq!(enumerate_copies(&ap3(), 1).count(), 0);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(count_copies_closed_form(&ap3(), 5), 4);
        assert_eq!(count_copies_closed_form(&Pattern::corner(2), 3), 5);
        assert_eq!(count_copies_closed_form(&ap3(), 1), 0);
        assert_eq!(count_copies_closed_form(&Pattern::corner(3), 1), 0);
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_count(&GridSet::full(5, 1).unwrap(), &ap3()), 4);
        assert_eq!(gamma_count(&set1(5, &[1, 2, 4, 5]), &ap3()), 0);
        assert_eq!(gamma_count(&GridSet::empty(5, 1).unwrap(), &ap3()), 0);
        assert!(is_x_free(&set1(5, &[1, 2, 4, 5]), &ap3()));
        assert!(!is_x_free(&GridSet::full(5, 1).unwrap(), &ap3()));
        assert!(is_x_free(&set1(9, &[7]), &ap3()));
    }

    #[test]
    fn non_primitive_input_is_normalized() {
        let p = Pattern::new(1, vec![vec![2], vec![4], vec![6]]).unwrap();
        assert_eq!(gamma_count(&GridSet::full(5, 1).unwrap(), &p), 4);
        assert_eq!(count_copies_closed_form(&p, 5), 4);
    }

    #[test]
    fn strategies_agree() {
        let a = set1(30, &[1, 2, 3, 5, 8, 9, 11, 14, 17, 20, 21, 23, 26, 29, 30]);
        for p in [ap3(), Pattern::new(1, vec![vec![0], vec![1], vec![3]]).unwrap()] {
            let s = gamma_count_with(&a, &p, GammaStrategy::Scan, false);
            let t = gamma_count_with(&a, &p, GammaStrategy::Anchored, false);
            assert_eq!(s, t);
            assert!(s > 0);
        }
    }

    #[test]
    fn codegree_examples() {
        let s = codegree_stats(&ap3(), 5).unwrap();
        assert_eq!(s.edge_count, 4);
        assert!((s.avg_degree - 2.4).abs() < 1e-12);
        assert!(s.codegree(2) <= 6);
        // pair {2,3} lies in {1,2,3} and {2,3,4}; {1,3} in {1,2,3} and {1,3,5}
        assert_eq!(s.codegree(2), 2);
        assert_eq!(s.codegree(3), 1);

        let c = codegree_stats(&Pattern::corner(2), 2).unwrap();
        assert_eq!(c.edge_count, 1);
        assert_eq!(c.codegrees, vec![1, 1]);

        let e = codegree_stats(&ap3(), 2).unwrap();
        assert_eq!(e.edge_count, 0);
        assert_eq!(e.codegrees, vec![0, 0]);
    }

    #[test]
    fn codegree_cap_is_reported() {
        let err = codegree_stats_capped(&ap3(), 100, 50, 1_000).unwrap_err();
        assert!(matches!(err, Error::Budget { cap: 50, .. }));
    }
}
