//! Values recomputed independently with 50-digit arithmetic.

#![allow(clippy::excessive_precision)]

use xfree_core::container::schedule;
use xfree_core::provider::RValue;
use xfree_core::supersat::{alpha_default, m_of_n_value};

fn close(a: f64, b: f64) -> bool {
    ((a - b) / b).abs() < 1e-12
}

#[test]
fn schedule_goldens() {
    let cases = [
        (10_000u64, 1usize, 3usize, 1_000u64, 1.0, 187_416.794_439_768_907_41, 0.023_045_113_851_687_131_08),
        (1_000_000, 1, 3, 100_000, 0.375, 32_021.916_362_482_390_664, 0.009_104_242_509_308_496_229_2),
        (50, 2, 3, 100, 0.375, 730_312.227_193_427_971_7, 0.269_605_153_097_903_856_06),
        (100_000, 1, 4, 5_000, 0.25, 21_820_045_823.070_419_162, 0.013_034_235_849_852_876_98),
    ];
    for (n, d, k, r, g, eps, tau) in cases {
        let s = schedule(n, d, k, RValue::user(r), g).unwrap();
        assert!(close(s.epsilon(), eps), "eps n={n}: {} vs {eps}", s.epsilon());
        assert!(close(s.tau(), tau), "tau n={n}: {} vs {tau}", s.tau());
    }
}

#[test]
fn alpha_and_m_goldens() {
    assert!(close(alpha_default(1.0, 3).unwrap(), 0.000_276_542_185_073_916_791_551));
    // (10^4 / ln^9 10^4)·10^-5 ≈ 2.1e-10
    assert_eq!(m_of_n_value(10_000, 1, 3, 1_000), 2);
}
