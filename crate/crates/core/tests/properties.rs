mod common;

use std::collections::BTreeSet;

use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use xfree_core::behrend::{behrend_lift, compute_t};
use xfree_core::container::{check_container_hypotheses, ln_delta_tau, schedule};
use xfree_core::provider::RValue;
use xfree_core::solver::{count_xfree_subsets, solve_rx_exact, CountOptions, SolveOptions};
use xfree_core::{Pattern, Rational};

fn opts() -> SolveOptions {
    SolveOptions::default()
}

fn r(p: &Pattern, n: u64) -> u64 {
    let rec = solve_rx_exact(p, n, &opts()).unwrap();
    assert!(rec.exact);
    rec.lower
}

fn small_pattern_1d() -> impl Strategy<Value = Pattern> {
    prop::collection::btree_set(0i64..7, 3..5)
        .prop_map(|s| Pattern::new(1, s.into_iter().map(|x| vec![x]).collect()).unwrap())
}

fn triangle_2d() -> impl Strategy<Value = Pattern> {
    prop::collection::btree_set((0i64..5, 0i64..5), 3)
        .prop_filter("non-degenerate", |s| {
            let v: Vec<_> = s.iter().collect();
            let (a, b, c) = (v[0], v[1], v[2]);
            (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0) != 0
        })
        .prop_map(|s| Pattern::new(2, s.into_iter().map(|(x, y)| vec![x, y]).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn r_is_monotone_in_n(p in small_pattern_1d(), n in 1u64..14) {
        prop_assert!(r(&p, n) <= r(&p, n + 1));
        prop_assert!(r(&p, n + 1) <= r(&p, n) + 1);
    }

    #[test]
    fn sub_patterns_are_harder_to_avoid(p in small_pattern_1d(), n in 1u64..14) {
        // a set free of a sub-pattern is free of the pattern
        for t in p.triples() {
            prop_assert!(r(&t, n) <= r(&p, n));
        }
    }

    #[test]
    fn count_is_at_least_two_to_the_r(p in small_pattern_1d(), n in 1u64..14) {
        let c = count_xfree_subsets(&p, n, &CountOptions::default()).unwrap();
        prop_assert!(c.log2_count + 1e-9 >= r(&p, n) as f64);
    }

    #[test]
    fn workers_do_not_change_the_answer(p in small_pattern_1d(), n in 4u64..18) {
        let one = solve_rx_exact(&p, n, &opts()).unwrap();
        for w in [2, 4] {
            let many = solve_rx_exact(&p, n, &SolveOptions { workers: w, ..opts() }).unwrap();
            prop_assert_eq!(&many, &one);
        }
    }

    #[test]
    fn t_is_similarity_invariant(p in triangle_2d(), s in 1i64..4, dx in 0i64..3, dy in 0i64..3) {
        let f = compute_t(&p).unwrap();
        prop_assert!(!f.t.is_zero() && !f.t.is_one());
        let q = Pattern::new(
            2,
            p.points().iter().map(|x| vec![s * x[0] + dx, s * x[1] + dy]).collect(),
        ).unwrap();
        prop_assert_eq!(compute_t(&q).unwrap().t, f.t);
    }

    #[test]
    fn lifted_sets_are_x_free(p in triangle_2d(), n in 4u64..24) {
        let c = behrend_lift(&p, n, false).unwrap();
        prop_assert!(c.checked && c.verified);
        let pts = p.normalize().points().to_vec();
        let a: BTreeSet<Vec<i64>> = c.set.points_sorted().into_iter().collect();
        prop_assert_eq!(brute_gamma(&pts, c.set.n() as i64, &a), 0);
        if c.admissible_prefixes > 0 {
            prop_assert_eq!(c.set_size(), c.admissible_prefixes * c.inner.set.len() as u64);
        }
    }

    #[test]
    fn delta_tau_is_homogeneous_and_decreasing(
        cd in prop::collection::vec(1.0f64..1e3, 2..7),
        dbar in 0.5f64..1e3,
        tau in 1e-3f64..10.0,
        scale in 0.1f64..10.0,
    ) {
        let k = cd.len() + 1;
        let base = ln_delta_tau(k, &cd, dbar, tau).unwrap();
        let scaled: Vec<f64> = cd.iter().map(|x| x * scale).collect();
        let s = ln_delta_tau(k, &scaled, dbar, tau).unwrap();
        prop_assert!((s - base - scale.ln()).abs() < 1e-9);
        prop_assert!(ln_delta_tau(k, &cd, dbar, tau * 1.01).unwrap() < base);
    }

    #[test]
    fn bounded_codegree_meets_its_target(
        n in 3u64..1_000_000_000,
        k in 3usize..=8,
        d in 1usize..4,
        frac in 0.0001f64..1.0,
        gamma in 0.01f64..2.0,
    ) {
        let full = (n as f64).powi(d as i32);
        let r = ((full * frac).max(1.0)).min(u64::MAX as f64 / 2.0) as u64;
        let s = schedule(n, d, k, RValue::user(r.max(1)), gamma).unwrap();
        let h = check_container_hypotheses(&s, None).unwrap();
        prop_assert!((h.delta_ratio() - 1.0).abs() < 1e-9);
        prop_assert!(h.delta_ok);
    }
}

#[test]
fn t_of_the_collinear_triple() {
    let p = Pattern::new(2, vec![vec![0, 0], vec![1, 1], vec![2, 2]]).unwrap();
    assert_eq!(compute_t(&p).unwrap().t, Rational::from_integer(-1));
}
