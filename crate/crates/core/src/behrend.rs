//! Behrend-type X-free sets in every dimension.
//!
//! In one dimension a three-point pattern `{a < b < c}` is determined up to
//! similarity by `q = (b − a)/(c − b)`. The construction takes a maximum
//! sphere shell of the digit cube `[M]^N` and reads each vector as the
//! digits of an integer in base `B`: a copy of the triple among the images
//! would force a strict convex combination of three points on one sphere.
//!
//! In dimension `d ≥ 2` a three-point sub-pattern `{x, y, z}` is pushed
//! through the linear form `s ↦ Σ (s_i − n/2)(x_i − y_i)`, which maps every
//! copy of `{z, x, y}` to a copy of the 1-D triple `{0, t, 1}`; the preimage
//! of a 1-D `{0, t, 1}`-free set is X-free.
//!
//! With `q = u/v` in lowest terms the digit base is `B = (u + v)·M` and
//! `M = ⌊n^{1/N} / (u + v)⌋`. For integer `q` this is `B = (q + 1)·M`. The
//! integer form keeps every image an integer and every digit of
//! `(u+v)·f(y) − v·f(x) − u·f(z)` below `B` in magnitude.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::copies::{is_x_free, primitive};
use crate::error::{Error, Result};
use crate::grid::{vertex_count, GridSet};
use crate::pattern::{Pattern, Rational, RationalTriple};
use crate::solver::{Provenance, RNumberRecord};

/// Largest grid (in vertices) that is checked with `is_x_free`.
pub const VERIFY_CAP: u64 = 20_000_000;
/// Largest grid that `behrend_lift` will materialize.
pub const LIFT_CAP: u64 = 100_000_000;
/// Largest shell that will be enumerated.
pub const SHELL_CAP: u128 = 50_000_000;

#[derive(Debug, Clone)]
pub struct Behrend1DCertificate {
    pub triple: RationalTriple,
    pub q: Rational,
    pub n: u64,
    /// Number of digits, `⌈√(ln n)⌉` (at least 1).
    pub digits: u32,
    /// Digit range `[1, M]`.
    pub m: u64,
    /// Digit base.
    pub base: u64,
    pub radius_sq: Option<u64>,
    pub shell_size: u64,
    /// `M^N / (N·M² − N + 1)`.
    pub pigeonhole_bound: Rational,
    pub fallback: bool,
    /// The set, sorted.
    pub set: Vec<u64>,
    /// Whether `is_x_free` ran (the grid fit under the cap).
    pub checked: bool,
    pub verified: bool,
}

impl Behrend1DCertificate {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "construction = behrend-1d");
        let _ = writeln!(s, "triple = {}", self.triple);
        let _ = writeln!(s, "q = {}", self.q);
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "digits = {}", self.digits);
        let _ = writeln!(s, "m = {}", self.m);
        let _ = writeln!(s, "base = {}", self.base);
        let _ = writeln!(
            s,
            "radius_sq = {}",
            self.radius_sq.map_or("none".to_string(), |r| r.to_string())
        );
        let _ = writeln!(s, "shell_size = {}", self.shell_size);
        let _ = writeln!(s, "pigeonhole_bound = {}", self.pigeonhole_bound);
        let _ = writeln!(s, "fallback = {}", self.fallback);
        let _ = writeln!(s, "set_size = {}", self.set.len());
        let _ = writeln!(s, "checked = {}", self.checked);
        let _ = writeln!(s, "verified = {}", self.verified);
        s
    }

    /// The set as a subset of `[n]`.
    pub fn to_gridset(&self) -> Result<GridSet> {
        GridSet::from_points(self.n, 1, self.set.iter().map(|&a| [a as i64]))
    }
}

/// `⌈√(ln n)⌉`, at least 1.
pub fn digit_count(n: u64) -> u32 {
    let v = (n as f64).ln().max(0.0).sqrt().ceil() as u32;
    // e^{j²} is never an integer for j ≥ 1, so the float ceiling is safe
    v.max(1)
}

/// Largest `m ≥ 0` with `(scale·m)^digits ≤ n`, i.e. `⌊n^{1/N} / scale⌋`.
pub fn digit_range(n: u64, digits: u32, scale: u128) -> u64 {
    let fits = |m: u128| {
        (scale * m).checked_pow(digits).is_some_and(|v| v <= n as u128)
    };
    let mut m = ((n as f64).powf(1.0 / digits as f64) / scale as f64).floor().max(0.0) as u128;
    while m > 0 && !fits(m) {
        m -= 1;
    }
    while fits(m + 1) {
        m += 1;
    }
    m as u64
}

/// Number of vectors of `[m]^digits` at each squared norm.
pub fn shell_census(m: u64, digits: u32) -> Vec<u128> {
    let max = digits as usize * (m * m) as usize;
    let mut dp = vec![0u128; max + 1];
    dp[0] = 1;
    for _ in 0..digits {
        let mut next = vec![0u128; max + 1];
        for (s, &c) in dp.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for x in 1..=m as usize {
                let t = s + x * x;
                if t > max {
                    break;
                }
                next[t] += c;
            }
        }
        dp = next;
    }
    dp
}

fn shell_vectors(m: u64, digits: u32, radius_sq: u64) -> Vec<Vec<u64>> {
    fn go(m: u64, left: u32, rem: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left == 0 {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let l = left as u64;
        if rem < l || rem > l * m * m {
            return;
        }
        for x in 1..=m {
            if x * x > rem {
                break;
            }
            cur.push(x);
            go(m, left - 1, rem - x * x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m, digits, radius_sq, &mut Vec::new(), &mut out);
    out
}

/// `Σ x_i·base^(i−1)`, first digit least significant.
pub fn digit_map(x: &[u64], base: u64) -> u128 {
    x.iter().rev().fold(0u128, |acc, &d| acc * base as u128 + d as u128)
}

/// Exhaustive injectivity check of the digit map on `[m]^digits`; `None`
/// when the cube has more than `limit` points.
pub fn digit_map_injective(m: u64, digits: u32, base: u64, limit: u64) -> Option<bool> {
    let total = (m as u128).checked_pow(digits)?;
    if total > limit as u128 {
        return None;
    }
    let mut vals = Vec::with_capacity(total as usize);
    let mut x = vec![1u64; digits as usize];
    loop {
        vals.push(digit_map(&x, base));
        let mut i = 0;
        loop {
            if i == x.len() {
                vals.sort_unstable();
                let len = vals.len();
                vals.dedup();
                return Some(vals.len() == len);
            }
            if x[i] < m {
                x[i] += 1;
                break;
            }
            x[i] = 1;
            i += 1;
        }
    }
}

/// The 1-D construction for the triple inside `[n]`.
///
/// Falls back to `{1}` when the digit range `M` is below 2.
pub fn behrend_1d(triple: &RationalTriple, n: u64) -> Result<Behrend1DCertificate> {
    behrend_1d_capped(triple, n, VERIFY_CAP)
}

pub fn behrend_1d_capped(
    triple: &RationalTriple,
    n: u64,
    verify_cap: u64,
) -> Result<Behrend1DCertificate> {
    if n < 1 {
        return Err(Error::InvalidArgument("behrend_1d needs n >= 1".into()));
    }
    let q = triple.q();
    let (u, v) = (*q.numer(), *q.denom());
    let scale = (u + v) as u128;
    let digits = digit_count(n);
    let m = digit_range(n, digits, scale);
    let base = (scale * m as u128) as u64;
    let pigeonhole_bound = if m >= 1 {
        let cube = Rational::from_integer((m as i128).pow(digits));
        let nn = digits as i128;
        cube / Rational::from_integer(nn * (m as i128).pow(2) - nn + 1)
    } else {
        Rational::zero()
    };

    let (set, radius_sq, shell_size, fallback) = if m < 2 {
        (vec![1u64], None, 0u64, true)
    } else {
        let census = shell_census(m, digits);
        let (best_r, &best) = census
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("census is non-empty");
        if best > SHELL_CAP {
            return Err(Error::Budget { what: "sphere shell size", cap: SHELL_CAP as u64 });
        }
        let vecs = shell_vectors(m, digits, best_r as u64);
        debug_assert_eq!(vecs.len() as u128, best);
        let mut set: Vec<u64> = vecs.iter().map(|x| digit_map(x, base) as u64).collect();
        set.sort_unstable();
        (set, Some(best_r as u64), best as u64, false)
    };
    if set.iter().any(|&a| a < 1 || a > n) {
        return Err(Error::Precondition(format!("construction left [1, {n}]")));
    }
    if !fallback {
        let lhs = Rational::from_integer(shell_size as i128);
        if lhs < pigeonhole_bound {
            return Err(Error::Precondition(format!(
                "shell size {shell_size} below the pigeonhole bound {pigeonhole_bound}"
            )));
        }
    }

    let checked = n <= verify_cap;
    let verified = if checked {
        let g = GridSet::from_points(n, 1, set.iter().map(|&a| [a as i64]))?;
        is_x_free(&g, &triple.to_primitive())
    } else {
        false
    };
    Ok(Behrend1DCertificate {
        triple: triple.clone(),
        q,
        n,
        digits,
        m,
        base,
        radius_sq,
        shell_size,
        pigeonhole_bound,
        fallback,
        set,
        checked,
        verified,
    })
}

/// A three-point pattern relabelled and rescaled for the slab lift.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleFrame {
    /// Indices into the pattern's point list of the points playing x, y, z.
    pub labels: [usize; 3],
    /// `x` and `y` after translating `z` to the origin and rescaling, in
    /// the original coordinate order.
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
    pub z: Vec<Rational>,
    /// `x − y`; the pivot entry is 1 and every entry has magnitude ≤ 1.
    pub weights: Vec<Rational>,
    /// Coordinate carrying the unit weight.
    pub pivot: usize,
    /// `max_i q_i` over the reduced denominators of the non-pivot weights.
    pub denominator_bound: i128,
    pub t: Rational,
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Relabels a three-point pattern so neither the angle at `x` nor at `y`
/// is right, moves `z` to the origin, rescales so the largest coordinate
/// difference of `x − y` is 1, and evaluates
/// `t = Σ y_i(y_i − x_i) / Σ (x_i − y_i)²`.
pub fn compute_t(p: &Pattern) -> Result<TriangleFrame> {
    if p.k() != 3 {
        return Err(Error::InvalidArgument(format!(
            "compute_t needs exactly 3 points, got {}",
            p.k()
        )));
    }
    let pts: Vec<Vec<Rational>> = p
        .points()
        .iter()
        .map(|x| x.iter().map(|&c| Rational::from_integer(c as i128)).collect())
        .collect();
    let labelings = [[1, 2, 0], [0, 2, 1], [0, 1, 2]];
    for [xi, yi, zi] in labelings {
        let z = &pts[zi];
        let mut x: Vec<Rational> = pts[xi].iter().zip(z).map(|(a, b)| a - b).collect();
        let mut y: Vec<Rational> = pts[yi].iter().zip(z).map(|(a, b)| a - b).collect();
        let diff: Vec<Rational> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        if dot(&x, &diff).is_zero() || dot(&y, &diff).is_zero() {
            continue;
        }
        // largest-magnitude difference, last index on ties
        let pivot = (0..p.d()).max_by_key(|&i| diff[i].abs()).unwrap();
        let scale = diff[pivot].abs();
        for c in x.iter_mut().chain(y.iter_mut()) {
            *c /= scale;
        }
        let mut labels = [xi, yi, zi];
        if diff[pivot].is_negative() {
            std::mem::swap(&mut x, &mut y);
            labels.swap(0, 1);
        }
        let weights: Vec<Rational> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        debug_assert!(weights[pivot].is_one());
        debug_assert!(weights.iter().all(|w| w.abs() <= Rational::one()));
        let norm = dot(&weights, &weights);
        let neg: Vec<Rational> = weights.iter().map(|w| -w).collect();
        let t = dot(&y, &neg) / norm;
        assert!(
            !t.is_zero() && !t.is_one(),
            "t = {t} after relabelling: the angle conditions were not enforced"
        );
        let denominator_bound = weights
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pivot)
            .map(|(_, w)| *w.denom())
            .max()
            .unwrap_or(1);
        return Ok(TriangleFrame {
            labels,
            x,
            y,
            z: vec![Rational::zero(); p.d()],
            weights,
            pivot,
            denominator_bound,
            t,
        });
    }
    unreachable!("a triangle has at most one right angle")
}

#[derive(Debug, Clone)]
pub struct LiftCertificate {
    pub pattern: Pattern,
    pub triple_used: Pattern,
    pub requested_n: u64,
    pub effective_n: u64,
    /// Absent for `d = 1`, where the 1-D construction is used directly.
    pub frame: Option<TriangleFrame>,
    pub inner: Behrend1DCertificate,
    /// Prefixes (all coordinates but the pivot) that take every target of
    /// the inner set to a valid pivot coordinate.
    pub admissible_prefixes: u64,
    /// Prefixes whose partial form is an integer in `[−n/4, 0]`.
    pub slab_prefixes: u64,
    pub set: GridSet,
    pub fallback: bool,
    pub checked: bool,
    pub verified: bool,
}

impl LiftCertificate {
    pub fn set_size(&self) -> u64 {
        self.set.len() as u64
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "construction = behrend-lift");
        let _ = writeln!(s, "pattern = {}", self.pattern);
        let _ = writeln!(s, "triple = {}", self.triple_used);
        let _ = writeln!(s, "requested_n = {}", self.requested_n);
        let _ = writeln!(s, "effective_n = {}", self.effective_n);
        if let Some(f) = &self.frame {
            let show = |v: &[Rational]| {
                v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
            };
            let _ = writeln!(s, "x = {}", show(&f.x));
            let _ = writeln!(s, "y = {}", show(&f.y));
            let _ = writeln!(s, "z = {}", show(&f.z));
            let _ = writeln!(s, "weights = {}", show(&f.weights));
            let _ = writeln!(s, "pivot = {}", f.pivot + 1);
            let _ = writeln!(s, "denominator_bound = {}", f.denominator_bound);
            let _ = writeln!(s, "t = {}", f.t);
        }
        let _ = writeln!(s, "admissible_prefixes = {}", self.admissible_prefixes);
        let _ = writeln!(s, "slab_prefixes = {}", self.slab_prefixes);
        let _ = writeln!(s, "inner_set_size = {}", self.inner.set.len());
        let _ = writeln!(s, "set_size = {}", self.set.len());
        let _ = writeln!(s, "fallback = {}", self.fallback);
        let _ = writeln!(s, "checked = {}", self.checked);
        let _ = writeln!(s, "verified = {}", self.verified);
        let _ = writeln!(s, "[inner]");
        s.push_str(&self.inner.to_text());
        s
    }
}

/// Effective side length: `n` rounded down to a multiple of `4(d − 1)`.
pub fn effective_side(n: u64, d: usize) -> u64 {
    if d <= 1 {
        n
    } else {
        let m = 4 * (d as u64 - 1);
        n - n % m
    }
}

/// Builds an X-free subset of `[n]^d` for the first 3-point sub-pattern
/// (or the best of all of them with `all_triples`).
pub fn behrend_lift(p: &Pattern, n: u64, all_triples: bool) -> Result<LiftCertificate> {
    behrend_lift_capped(p, n, all_triples, VERIFY_CAP)
}

pub fn behrend_lift_capped(
    p: &Pattern,
    n: u64,
    all_triples: bool,
    verify_cap: u64,
) -> Result<LiftCertificate> {
    let p = primitive(p).into_owned();
    let triples = p.triples();
    let candidates = if all_triples { &triples[..] } else { &triples[..1] };
    let mut best: Option<LiftCertificate> = None;
    for tri in candidates {
        let cert = lift_triple(&p, tri, n, verify_cap)?;
        let better = match &best {
            None => true,
            Some(b) => {
                (cert.verified || !cert.checked) && cert.set_size() > b.set_size()
            }
        };
        if better {
            best = Some(cert);
        }
    }
    Ok(best.expect("a pattern has at least one triple"))
}

fn lift_triple(p: &Pattern, tri: &Pattern, n: u64, verify_cap: u64) -> Result<LiftCertificate> {
    let d = p.d();
    if n < 1 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if d == 1 {
        let triple = RationalTriple::from_pattern(tri)?;
        let inner = behrend_1d_capped(&triple, n, verify_cap)?;
        let set = inner.to_gridset()?;
        let checked = n <= verify_cap;
        let verified = checked && is_x_free(&set, p);
        return Ok(LiftCertificate {
            pattern: p.clone(),
            triple_used: tri.clone(),
            requested_n: n,
            effective_n: n,
            frame: None,
            fallback: inner.fallback,
            inner,
            admissible_prefixes: 1,
            slab_prefixes: 1,
            set,
            checked,
            verified,
        });
    }

    let frame = compute_t(tri)?;
    let n_eff = effective_side(n, d);
    let zero = Rational::zero();
    let one = Rational::one();
    let inner_triple = RationalTriple::new(zero, frame.t, one)?;
    if n_eff == 0 {
        // too small for the slab: a single point is X-free
        let inner = behrend_1d_capped(&inner_triple, 1, verify_cap)?;
        let set = GridSet::from_points(n, d, [vec![1i64; d]])?;
        return Ok(LiftCertificate {
            pattern: p.clone(),
            triple_used: tri.clone(),
            requested_n: n,
            effective_n: n_eff,
            frame: Some(frame),
            inner,
            admissible_prefixes: 0,
            slab_prefixes: 0,
            set,
            fallback: true,
            checked: true,
            verified: true,
        });
    }
    let total = vertex_count(n_eff, d).filter(|&v| v <= LIFT_CAP).ok_or(Error::Budget {
        what: "lifted grid n^d",
        cap: LIFT_CAP,
    })?;
    let inner = behrend_1d_capped(&inner_triple, n_eff / 4, verify_cap)?;
    let targets: Vec<i128> = inner.set.iter().map(|&a| a as i128).collect();
    let (a_min, a_max) = (targets[0], *targets.last().unwrap());
    let half = Rational::from_integer(n_eff as i128 / 2);
    let quarter = Rational::from_integer(n_eff as i128 / 4);
    let n_i = n_eff as i128;

    let mut set = GridSet::empty(n_eff, d)?;
    let mut admissible = 0u64;
    let mut slab = 0u64;
    let others: Vec<usize> = (0..d).filter(|&i| i != frame.pivot).collect();
    let mut prefix = vec![1i64; d - 1];
    let mut point = vec![0i64; d];
    loop {
        let partial: Rational = others
            .iter()
            .zip(&prefix)
            .map(|(&i, &s)| (Rational::from_integer(s as i128) - half) * frame.weights[i])
            .sum();
        if partial.is_integer() {
            let pint = partial.to_integer();
            let h = n_i / 2;
            // pivot coordinate h + a − P must lie in [1, n] for every target
            if h + a_min - pint >= 1 && h + a_max - pint <= n_i {
                admissible += 1;
                if partial <= zero && partial >= -quarter {
                    slab += 1;
                }
                for (&i, &s) in others.iter().zip(&prefix) {
                    point[i] = s;
                }
                for &a in &targets {
                    point[frame.pivot] = (h + a - pint) as i64;
                    set.insert(&point)?;
                }
            }
        }
        let mut j = 0;
        loop {
            if j == prefix.len() {
                break;
            }
            if prefix[j] < n_eff as i64 {
                prefix[j] += 1;
                break;
            }
            prefix[j] = 1;
            j += 1;
        }
        if j == prefix.len() {
            break;
        }
    }
    debug_assert_eq!(set.len() as u64, admissible * targets.len() as u64);
    let (set, fallback) = if set.is_empty() {
        (GridSet::from_points(n_eff, d, [vec![1i64; d]])?, true)
    } else {
        (set, inner.fallback)
    };
    let checked = total <= verify_cap;
    let verified = checked && is_x_free(&set, p);
    Ok(LiftCertificate {
        pattern: p.clone(),
        triple_used: tri.clone(),
        requested_n: n,
        effective_n: n_eff,
        frame: Some(frame),
        inner,
        admissible_prefixes: admissible,
        slab_prefixes: slab,
        set,
        fallback,
        checked,
        verified,
    })
}

/// One row of the construction's density profile.
#[derive(Debug, Clone)]
pub struct BehrendRow {
    pub n: u64,
    pub effective_n: u64,
    pub set_size: u64,
    /// `|S| / n^d`.
    pub density: f64,
    /// `−ln(|S|/n^d) / √(ln n)`; `None` for `n = 1`.
    pub empirical_c: Option<f64>,
    pub checked: bool,
    pub verified: bool,
    pub record: RNumberRecord,
}

impl BehrendRow {
    pub fn csv_header() -> &'static str {
        "n,effective_n,set_size,density,empirical_c,verified"
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            self.effective_n,
            self.set_size,
            crate::cli::fmt_float(self.density),
            self.empirical_c.map_or("nan".to_string(), crate::cli::fmt_float),
            if self.verified { 1 } else { 0 }
        )
    }
}

/// Runs the lift for every `n` and records the sizes as lower bounds.
pub fn lower_bound_table(p: &Pattern, ns: &[u64], all_triples: bool) -> Result<Vec<BehrendRow>> {
    let p = primitive(p).into_owned();
    let d = p.d();
    ns.iter()
        .map(|&n| {
            let cert = behrend_lift(&p, n, all_triples)?;
            let size = cert.set_size();
            let vol = (n as f64).powi(d as i32);
            let density = size as f64 / vol;
            let empirical_c = (n > 1).then(|| -(density.ln()) / (n as f64).ln().sqrt());
            let upper = vertex_count(n, d).unwrap_or(u64::MAX);
            let witness = if cert.effective_n == n { Some(cert.set.clone()) } else { None };
            Ok(BehrendRow {
                n,
                effective_n: cert.effective_n,
                set_size: size,
                density,
                empirical_c,
                checked: cert.checked,
                verified: cert.verified,
                record: RNumberRecord {
                    pattern_id: p.hash_id(),
                    n,
                    d,
                    lower: size,
                    upper,
                    exact: size == upper,
                    witness,
                    provenance: Provenance::Behrend,
                },
            })
        })
        .collect()
}

/// Largest empirical constant over a table, skipping rows without one.
pub fn max_empirical_c(rows: &[BehrendRow]) -> Option<f64> {
    rows.iter().filter_map(|r| r.empirical_c).fold(None, |acc, c| {
        Some(acc.map_or(c, |a: f64| a.max(c)))
    })
}

/// Census of squared norms as a map, for certificates and tests.
pub fn shell_histogram(m: u64, digits: u32) -> BTreeMap<u64, u128> {
    shell_census(m, digits)
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(r, c)| (r as u64, c))
        .collect()
}

/// `a/b` as the nearest `f64`, for reporting only.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

/// Least common multiple of the denominators of a rational vector.
pub fn common_denominator(v: &[Rational]) -> i128 {
    v.iter().fold(1i128, |acc, r| acc.lcm(r.denom()))
}
