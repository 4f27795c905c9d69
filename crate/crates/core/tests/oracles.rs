mod common;

use std::collections::BTreeSet;

use common::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xfree_core::behrend::{behrend_1d, digit_map_injective};
use xfree_core::copies::{codegree_stats, gamma_count_with, GammaStrategy};
use xfree_core::solver::{count_xfree_subsets, solve_rx_exact, CountOptions, SolveOptions};
use xfree_core::{count_copies_closed_form, enumerate_copies, gamma_count, GridSet, Pattern, RationalTriple};

fn pat(points: &[Vec<i64>]) -> Pattern {
    Pattern::new(points[0].len(), points.to_vec()).unwrap()
}

#[test]
fn solver_and_counter_match_exhaustive_search() {
    let cases: Vec<(Vec<Vec<i64>>, i64)> = vec![
        (ap3(), 12),
        (corner2(), 4),
        (vec![vec![0], vec![1], vec![3]], 12),
        (vec![vec![0], vec![1], vec![2], vec![3]], 12),
        (vec![vec![0, 0], vec![1, 1], vec![2, 0]], 4),
    ];
    for (pts, max_n) in cases {
        let p = pat(&pts);
        for n in 1..=max_n {
            let (r, count) = brute_extremal(&pts, n);
            let rec = solve_rx_exact(&p, n as u64, &SolveOptions::default()).unwrap();
            assert!(rec.exact);
            assert_eq!(rec.lower, r, "r for {p} at n={n}");
            let w = rec.witness.unwrap();
            assert_eq!(w.len() as u64, r);
            let wset: BTreeSet<Vec<i64>> = w.points_sorted().into_iter().collect();
            assert_eq!(brute_gamma(&pts, n, &wset), 0);
            if (n as u64).pow(p.d() as u32) <= 16 {
                let c = count_xfree_subsets(&p, n as u64, &CountOptions::default()).unwrap();
                assert_eq!(c.count_decimal(), count.to_string(), "count for {p} at n={n}");
            }
        }
    }
}

#[test]
fn copy_enumeration_matches_naive_listing() {
    let battery = [
        ap3(),
        vec![vec![0], vec![1], vec![3]],
        vec![vec![0], vec![2], vec![3]],
        corner2(),
        vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
    ];
    for pts in &battery {
        let p = pat(pts);
        let max_n = if p.d() == 3 { 5 } else { 9 };
        for n in 1..=max_n {
            let want: BTreeSet<Vec<Vec<i64>>> = naive_copies(pts, n)
                .into_iter()
                .map(|mut c| {
                    c.sort();
                    c
                })
                .collect();
            let got: BTreeSet<Vec<Vec<i64>>> = enumerate_copies(&p, n as u64)
                .map(|c| {
                    let mut pts = c.points(&p);
                    pts.sort();
                    pts
                })
                .collect();
            assert_eq!(got, want, "{p} n={n}");
            assert_eq!(count_copies_closed_form(&p, n as u64), want.len() as u128);
        }
    }
}

#[test]
fn codegrees_match_naive_counts() {
    for pts in [ap3(), corner2(), vec![vec![0], vec![1], vec![2], vec![3]]] {
        let p = pat(&pts);
        let max_n = if p.d() == 2 { 5 } else { 12 };
        for n in 3..=max_n {
            let h = codegree_stats(&p, n as u64).unwrap();
            for j in 2..=p.k() {
                assert_eq!(h.codegree(j), brute_codegree(&pts, n, j), "{p} n={n} j={j}");
            }
        }
    }
}

#[test]
fn gamma_matches_naive_count_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for pts in [ap3(), corner2(), vec![vec![0], vec![1], vec![3]]] {
        let p = pat(&pts);
        let d = p.d();
        for _ in 0..40 {
            let n = if d == 1 { rng.random_range(1..30i64) } else { rng.random_range(1..8i64) };
            let density = rng.random_range(0.2..1.0);
            let a: BTreeSet<Vec<i64>> =
                grid_points(n, d).into_iter().filter(|_| rng.random_bool(density)).collect();
            let g = GridSet::from_points(n as u64, d, a.iter()).unwrap();
            let want = brute_gamma(&pts, n, &a) as u128;
            assert_eq!(gamma_count(&g, &p), want);
            assert_eq!(gamma_count_with(&g, &p, GammaStrategy::Scan, false), want);
            assert_eq!(gamma_count_with(&g, &p, GammaStrategy::Anchored, false), want);
        }
    }
}

#[test]
fn behrend_sets_avoid_every_rational_ratio() {
    // q = u/v for triples {0, u, u + v}
    for (u, v) in [(1, 1), (1, 2), (2, 1), (2, 3), (3, 2), (1, 3), (3, 1), (3, 4), (5, 2)] {
        let t = RationalTriple::from_integers(0, u, u + v).unwrap();
        for n in [50u64, 500, 5000, 40_000] {
            let c = behrend_1d(&t, n).unwrap();
            assert!(c.set.iter().all(|&a| (1..=n).contains(&a)));
            assert!(!has_ratio_triple(&c.set, u as u64, v as u64), "q={u}/{v} n={n}");
            assert!(c.verified, "q={u}/{v} n={n}");
            if !c.fallback && (c.m as u128).pow(c.digits) <= 1_000_000 {
                assert_eq!(digit_map_injective(c.m, c.digits, c.base, 1_000_000), Some(true));
            }
        }
    }
}
