//! Brute-force reference implementations. They share no code with the
//! library beyond the pattern's point list.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// Points of `[n]^d` in lexicographic order.
pub fn grid_points(n: i64, d: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for p in &out {
            for x in 1..=n {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Every copy `b + r·X` with `r ≥ 1` inside `[n]^d`, as point lists. The
/// base ranges over a box large enough to reach every placement.
pub fn naive_copies(pattern: &[Vec<i64>], n: i64) -> Vec<Vec<Vec<i64>>> {
    let d = pattern[0].len();
    let mut out = Vec::new();
    for r in 1..=n {
        for b in grid_points(2 * n + 1, d) {
            let b: Vec<i64> = b.iter().map(|x| x - n - 1).collect();
            let pts: Vec<Vec<i64>> = pattern
                .iter()
                .map(|x| x.iter().zip(&b).map(|(xi, bi)| bi + r * xi).collect())
                .collect();
            if pts.iter().all(|p| p.iter().all(|&c| (1..=n).contains(&c))) {
                out.push(pts);
            }
        }
    }
    out
}

/// Copies as bitmasks over `grid_points(n, d)`.
pub fn copy_masks(pattern: &[Vec<i64>], n: i64) -> Vec<u64> {
    let d = pattern[0].len();
    let pts = grid_points(n, d);
    assert!(pts.len() <= 64);
    let index = |p: &Vec<i64>| pts.iter().position(|q| q == p).unwrap();
    naive_copies(pattern, n)
        .iter()
        .map(|c| c.iter().fold(0u64, |m, p| m | 1 << index(p)))
        .collect()
}

/// `(r_X(n), number of X-free sets)` over all `2^{n^d}` subsets.
pub fn brute_extremal(pattern: &[Vec<i64>], n: i64) -> (u64, u64) {
    let d = pattern[0].len();
    let v = grid_points(n, d).len();
    assert!(v <= 24, "too many subsets");
    let masks = copy_masks(pattern, n);
    let mut best = 0;
    let mut count = 0;
    for s in 0u64..1 << v {
        if masks.iter().all(|&m| s & m != m) {
            count += 1;
            best = best.max(s.count_ones() as u64);
        }
    }
    (best, count)
}

/// `Γ_X(A)` by listing every copy in the grid.
pub fn brute_gamma(pattern: &[Vec<i64>], n: i64, a: &BTreeSet<Vec<i64>>) -> u64 {
    naive_copies(pattern, n)
        .iter()
        .filter(|c| c.iter().all(|p| a.contains(p)))
        .count() as u64
}

/// Largest number of copies through any `j` points.
pub fn brute_codegree(pattern: &[Vec<i64>], n: i64, j: usize) -> u64 {
    use std::collections::HashMap;
    let mut acc: HashMap<Vec<Vec<i64>>, u64> = HashMap::new();
    for c in naive_copies(pattern, n) {
        let mut c = c.clone();
        c.sort();
        for sub in subsets(&c, j) {
            *acc.entry(sub).or_default() += 1;
        }
    }
    acc.values().copied().max().unwrap_or(0)
}

fn subsets<T: Clone>(xs: &[T], j: usize) -> Vec<Vec<T>> {
    if j == 0 {
        return vec![vec![]];
    }
    if xs.len() < j {
        return vec![];
    }
    let mut with: Vec<Vec<T>> = subsets(&xs[1..], j - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, xs[0].clone());
            s
        })
        .collect();
    with.extend(subsets(&xs[1..], j));
    with
}

/// Whether integers `x < y < z` of `set` realize `(y − x)/(z − y) = u/v`.
pub fn has_ratio_triple(set: &[u64], u: u64, v: u64) -> bool {
    let s: BTreeSet<u64> = set.iter().copied().collect();
    for (i, &x) in set.iter().enumerate() {
        for &y in &set[i + 1..] {
            // z − y = v(y − x)/u
            if (v * (y - x)).is_multiple_of(u) && s.contains(&(y + v * (y - x) / u)) {
                return true;
            }
        }
    }
    false
}

pub fn ap3() -> Vec<Vec<i64>> {
    vec![vec![0], vec![1], vec![2]]
}

pub fn corner2() -> Vec<Vec<i64>> {
    vec![vec![0, 0], vec![0, 1], vec![1, 0]]
}
