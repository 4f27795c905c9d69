//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xfree_core::behrend::{behrend_1d, behrend_lift, compute_t, digit_map_injective};
use xfree_core::container::{
    check_container_hypotheses, delta_tau_value, estimate_gamma_const, schedule, DeltaMode,
};
use xfree_core::copies::codegree_stats;
use xfree_core::primes::{verify_pnt_constant, SIEVE_CAP};
use xfree_core::provider::RValue;
use xfree_core::solver::{count_xfree_subsets, solve_rx_exact, CountOptions, SolveOptions};
use xfree_core::supersat::{
    check_supersat_trivial, estimate_expected_gamma, exact_expected_gamma, filter_sequence,
    sampling_setup, sampling_setup_from_record,
};
use xfree_core::{
    count_copies_closed_form, enumerate_copies, gamma_count, GridSet, Pattern, Rational,
    RationalTriple,
};

fn pat(points: &[Vec<i64>]) -> Pattern {
    Pattern::new(points[0].len(), points.to_vec()).unwrap()
}

fn solve(p: &Pattern, n: u64, workers: usize) -> xfree_core::RNumberRecord {
    let rec = solve_rx_exact(p, n, &SolveOptions { workers, ..SolveOptions::default() }).unwrap();
    assert!(rec.exact, "{p} n={n} not solved exactly");
    rec
}

fn c1_extremal_values() {
    for (pts, max_n) in [(ap3(), 12), (corner2(), 4)] {
        let p = pat(&pts);
        for n in 1..=max_n {
            let rec = solve(&p, n as u64, 1);
            assert_eq!(rec.lower, brute_extremal(&pts, n).0, "{p} n={n}");
        }
    }
    let ap = Pattern::progression(3);
    assert_eq!(solve(&ap, 8, 1).lower, 4);
    assert_eq!(solve(&ap, 9, 1).lower, 5);
    assert_eq!(solve(&Pattern::corner(2), 2, 1).lower, 3);
}

fn count(p: &Pattern, n: u64) -> String {
    count_xfree_subsets(p, n, &CountOptions::default()).unwrap().count_decimal()
}

fn c2_counts() {
    for (pts, max_n) in [(ap3(), 12), (corner2(), 3)] {
        let p = pat(&pts);
        for n in 1..=max_n {
            assert_eq!(count(&p, n as u64), brute_extremal(&pts, n).1.to_string(), "{p} n={n}");
        }
    }
    let ap = Pattern::progression(3);
    assert_eq!(count(&ap, 3), "7");
    assert_eq!(count(&ap, 4), "13");
    assert_eq!(count(&Pattern::corner(2), 2), "14");
}

fn c3_counting_shape() {
    let p = Pattern::progression(3);
    println!("  n  r  log2(count)  ratio");
    for n in 4..=14 {
        let r = solve(&p, n, 1).lower;
        let c = count_xfree_subsets(&p, n, &CountOptions::default()).unwrap();
        let ratio = c.log2_count / r as f64;
        println!("  {n:>2} {r:>2} {:>11.4} {ratio:>6.4}", c.log2_count);
        assert!(ratio < 4.0, "n={n} ratio {ratio}");
    }
}

fn c4_copy_engine() {
    let battery = [
        ap3(),
        vec![vec![0], vec![1], vec![3]],
        vec![vec![0], vec![2], vec![3]],
        corner2(),
        vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
        vec![vec![0], vec![1], vec![2], vec![3]],
    ];
    for pts in &battery {
        let p = pat(pts);
        let k = p.k() as u64;
        for n in 1..=50u64 {
            let listed = enumerate_copies(&p, n).count() as u128;
            assert_eq!(count_copies_closed_form(&p, n), listed, "{p} n={n}");
        }
        for n in 2..=20u64 {
            let h = codegree_stats(&p, n).unwrap();
            assert!(h.codegree(2) <= k * (k - 1), "{p} n={n}: Δ2 = {}", h.codegree(2));
        }
    }
}

fn c5_behrend_1d() {
    let t = RationalTriple::from_integers(0, 1, 2).unwrap();
    let c = behrend_1d(&t, 100).unwrap();
    assert_eq!((c.digits, c.m, c.set.len()), (3, 2, 3));
    assert!(c.verified);
    assert!(!has_ratio_triple(&c.set, 1, 1));
    let ap = Pattern::progression(3);
    for n in [1_000u64, 10_000, 100_000] {
        let c = behrend_1d(&t, n).unwrap();
        assert!(!c.fallback);
        assert_eq!(gamma_count(&c.to_gridset().unwrap(), &ap), 0, "n={n}");
        assert!(Rational::from_integer(c.set.len() as i128) >= c.pigeonhole_bound, "n={n}");
        if (c.m as u128).pow(c.digits) <= 1_000_000 {
            assert_eq!(digit_map_injective(c.m, c.digits, c.base, 1_000_000), Some(true), "n={n}");
        }
        println!("  n={n} N={} M={} |S|={}", c.digits, c.m, c.set.len());
    }
}

fn c6_lift() {
    let corner = Pattern::corner(2);
    assert_eq!(compute_t(&corner).unwrap().t, Rational::new(1, 2));
    let c = behrend_lift(&corner, 40, false).unwrap();
    assert!(c.verified);
    let copies_inside = enumerate_copies(&corner, 40)
        .filter(|cp| cp.points(&corner).iter().all(|x| c.set.contains(x)))
        .count();
    assert_eq!(copies_inside, 0);
    assert!(c.admissible_prefixes > 0);
    assert_eq!(c.set_size(), c.admissible_prefixes * c.inner.set.len() as u64);
    println!(
        "  |S|={} prefixes={} |S'|={}",
        c.set_size(),
        c.admissible_prefixes,
        c.inner.set.len()
    );
}

fn c7_supersaturation() {
    let ap = Pattern::progression(3);
    let r12 = solve(&ap, 12, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let a = GridSet::from_points(12, 1, (1..=12i64).filter(|_| rng.random_bool(0.5)).map(|x| [x])).unwrap();
        assert!(check_supersat_trivial(&a, &ap, &r12).unwrap());
    }
    for n in 1..=12 {
        let r = solve(&ap, n, 1);
        assert!(check_supersat_trivial(&GridSet::full(n, 1).unwrap(), &ap, &r).unwrap());
    }

    let full = GridSet::full(30, 1).unwrap();
    let setup = sampling_setup_from_record(&full, &ap, 3, &solve(&ap, 30, 1)).unwrap();
    let exact = exact_expected_gamma(&setup, &full, &ap).unwrap();
    assert!(exact.mean_gamma.is_one());
    assert!(exact.mean_size_bound_holds() && exact.region_bound_holds());
    let mc = estimate_expected_gamma(&setup, &full, &ap, 10_000, 1).unwrap();
    assert!((mc.mean - 1.0).abs() <= 3.0 * mc.stderr + 1e-12);

    let r50 = solve(&ap, 50, 1);
    let mut instances = 0;
    for seed in 0..6 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let a = GridSet::from_points(50, 1, (1..=50i64).filter(|_| rng.random_bool(0.85)).map(|x| [x])).unwrap();
        let Ok(setup) = sampling_setup(&a, &ap, 3, r50.lower, Some(r50.upper)) else { continue };
        instances += 1;
        let exact = exact_expected_gamma(&setup, &a, &ap).unwrap();
        assert!(exact.mean_size_bound_holds() && exact.region_bound_holds(), "seed {seed}");
        let want = rational_f64(&exact.mean_gamma);
        let mc = estimate_expected_gamma(&setup, &a, &ap, 10_000, seed).unwrap();
        assert!(mc.stderr > 0.0);
        assert!((mc.mean - want).abs() <= 3.0 * mc.stderr, "seed {seed}: {} vs {want}", mc.mean);
    }
    assert!(instances > 0);
}

fn rational_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap()
}

fn c8_pnt() {
    let r = verify_pnt_constant(2, 10, SIEVE_CAP).unwrap();
    assert!(!r.holds);
    assert_eq!(r.first_violation, Some(2));
    assert!(verify_pnt_constant(3, 1_000_000, SIEVE_CAP).unwrap().holds);
}

fn c9_container() {
    assert_eq!(delta_tau_value(3, &[1.0, 1.0], 1.0, 0.5).unwrap(), 16.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let n = rng.random_range(3u64..10_000_000);
        let d = rng.random_range(1usize..4);
        let k = rng.random_range(3usize..=8);
        let r = ((n as f64).powi(d as i32) * rng.random_range(1e-4..1.0)).max(1.0) as u64;
        let gamma = rng.random_range(0.01..2.0);
        let s = schedule(n, d, k, RValue::user(r), gamma).unwrap();
        let h = check_container_hypotheses(&s, None).unwrap();
        assert_eq!(h.mode, DeltaMode::Bounded);
        assert!((h.delta_ratio() - 1.0).abs() < 1e-9, "n={n} d={d} k={k}: {}", h.delta_ratio());
    }
    let ap = Pattern::progression(3);
    let gamma = estimate_gamma_const(&ap, (3, 30)).unwrap().gamma;
    for n in 3..=30 {
        let s = schedule(n, 1, 3, RValue::from(&solve(&ap, n, 1)), gamma).unwrap();
        let exact = check_container_hypotheses(&s, Some(&codegree_stats(&ap, n).unwrap())).unwrap();
        let bounded = check_container_hypotheses(&s, None).unwrap();
        assert!(exact.ln_delta <= bounded.ln_delta, "n={n}");
    }
}

fn c10_sequence_filter() {
    let ap = Pattern::progression(3);
    let table: BTreeMap<u64, RValue> = (1..=20).map(|n| (n, RValue::from(&solve(&ap, n, 1)))).collect();
    let half = |n: u64| n.div_ceil(2);
    // r(n)/n ≥ (a/b)·r(m)/m  ⇔  b·r(n)·m ≥ a·r(m)·n
    for (num, den) in [(1i128, 2i128), (1, 1), (3, 2)] {
        let alpha = BigRational::new(num.into(), den.into());
        let rep = filter_sequence(&table, half, &alpha, 1, (1, 20)).unwrap();
        let got: BTreeSet<u64> = rep.accepted().into_iter().collect();
        let want: BTreeSet<u64> = (1..=20u64)
            .filter(|&n| {
                let m = half(n);
                den * table[&n].value as i128 * m as i128 >= num * table[&m].value as i128 * n as i128
            })
            .collect();
        assert_eq!(got, want, "alpha {num}/{den}");
        println!("  alpha={num}/{den} accepted: {got:?}");
    }

    let all = filter_sequence(&table, half, &BigRational::zero(), 1, (1, 20)).unwrap();
    assert_eq!(all.accepted().len(), 20);
    let dense: BTreeMap<u64, RValue> = (1..=20).map(|n| (n, RValue::user(3 * n))).collect();
    let rep = filter_sequence(&dense, half, &BigRational::new(1.into(), 2.into()), 1, (1, 20)).unwrap();
    assert_eq!(rep.accepted().len(), 20);
    let rep = filter_sequence(&dense, half, &BigRational::one(), 1, (1, 20)).unwrap();
    assert_eq!(rep.accepted().len(), 20);
}

fn c11_reproducibility() {
    let ap3_file = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../patterns/ap3.txt");
    let run = || {
        let o = Command::new(env!("CARGO_BIN_EXE_xfree"))
            .args(["supersat-sample", "--pattern"])
            .arg(&ap3_file)
            .args(["--n", "80", "--m", "2", "--samples", "500", "--seed", "42", "--workers", "4"])
            .env_remove("XFREE_CACHE")
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        o.stdout
    };
    let (a, b) = (run(), run());
    assert!(!a.is_empty());
    assert_eq!(a, b);
    for (p, max_n) in [(Pattern::progression(3), 40u64), (Pattern::progression(4), 40), (Pattern::corner(2), 5)] {
        for n in 1..=max_n {
            let one = solve(&p, n, 1);
            for w in [2, 8] {
                assert_eq!(solve(&p, n, w), one, "{p} n={n} workers={w}");
            }
        }
    }
}

fn main() {
    let criteria: [(&str, fn(), u64); 11] = [
        ("exact extremal values", c1_extremal_values, 60),
        ("exact counting", c2_counts, 60),
        ("counting shape", c3_counting_shape, 120),
        ("copy engine", c4_copy_engine, 60),
        ("Behrend 1-D", c5_behrend_1d, 120),
        ("Behrend lift", c6_lift, 60),
        ("supersaturation audits", c7_supersaturation, 120),
        ("prime counting constant", c8_pnt, 10),
        ("container arithmetic", c9_container, 30),
        ("sequence filter", c10_sequence_filter, 5),
        ("reproducibility", c11_reproducibility, 60),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let ok = catch_unwind(AssertUnwindSafe(f)).is_ok();
        let took = start.elapsed();
        let in_time = took < Duration::from_secs(limit);
        let pass = ok && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} ({name}, {:.2}s{})",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            if in_time { String::new() } else { format!(", limit {limit}s") }
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
