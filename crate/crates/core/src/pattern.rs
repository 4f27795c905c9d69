//! Finite point patterns `X ⊆ ℕ^d` and their canonical primitive form.
//!
//! Two patterns are *similar* when one is a positive homothety of the other.
//! Similar patterns have the same family of non-trivial copies inside any
//! grid, so every computation in the crate runs against the unique primitive
//! representative: componentwise minimum zero, gcd of all coordinate
//! differences one, points in lexicographic order.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::error::{Error, ParseErrorKind, Result};

/// Exact rationals used on every construction path.
pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    d: usize,
    points: Vec<Vec<i64>>,
    widths: Vec<i64>,
    primitive: bool,
}

impl Pattern {
    /// Builds a pattern from raw points. Points are stored in lexicographic
    /// order; the primitive flag is computed, not trusted.
    pub fn new(d: usize, points: Vec<Vec<i64>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if points.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "a pattern needs at least 3 points, got {}",
                points.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(Error::InvalidArgument(format!(
                "point {p:?} does not have {d} coordinates"
            )));
        }
        let set: BTreeSet<Vec<i64>> = points.iter().cloned().collect();
        if set.len() != points.len() {
            return Err(Error::InvalidArgument("pattern points must be distinct".into()));
        }
        let points: Vec<Vec<i64>> = set.into_iter().collect();
        let widths = (0..d)
            .map(|i| {
                let max = points.iter().map(|p| p[i]).max().unwrap();
                let min = points.iter().map(|p| p[i]).min().unwrap();
                max - min
            })
            .collect();
        let primitive = is_primitive(d, &points);
        Ok(Pattern { d, points, widths, primitive })
    }

    /// The `k`-term arithmetic progression `{0, 1, …, k−1}`.
    pub fn progression(k: usize) -> Self {
        Pattern::new(1, (0..k as i64).map(|i| vec![i]).collect()).expect("k >= 3")
    }

    /// The corner `{0, e_1, …, e_d}`.
    pub fn corner(d: usize) -> Self {
        let mut pts = vec![vec![0; d]];
        for i in 0..d {
            let mut e = vec![0; d];
            e[i] = 1;
            pts.push(e);
        }
        Pattern::new(d, pts).expect("corner is valid for d >= 2")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of points, `|X|`.
    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn widths(&self) -> &[i64] {
        &self.widths
    }

    pub fn max_width(&self) -> i64 {
        self.widths.iter().copied().max().unwrap_or(0)
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    /// Translates so every coordinate has minimum 0 and divides by the gcd
    /// of all coordinate differences.
    pub fn normalize(&self) -> Pattern {
        let d = self.d;
        let mins: Vec<i64> = (0..d)
            .map(|i| self.points.iter().map(|p| p[i]).min().unwrap())
            .collect();
        // gcd over differences from a fixed base point equals the gcd over
        // all pairwise differences.
        let base = &self.points[0];
        let g = self
            .points
            .iter()
            .flat_map(|p| p.iter().zip(base).map(|(a, b)| (a - b).abs()))
            .fold(0i64, |acc, x| acc.gcd(&x));
        debug_assert!(g > 0);
        let points = self
            .points
            .iter()
            .map(|p| p.iter().zip(&mins).map(|(x, m)| (x - m) / g).collect())
            .collect();
        let out = Pattern::new(d, points).expect("normalization keeps points distinct");
        debug_assert!(out.primitive);
        out
    }

    /// Stable identifier of the pattern's similarity class.
    pub fn hash_id(&self) -> String {
        pattern_hash(&self.normalize())
    }

    /// Serializes to the pattern file format.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.d, self.k());
        for p in &self.points {
            s.push_str(&join(p));
            s.push('\n');
        }
        s
    }

    /// All 3-point sub-patterns in lexicographic order of index triples.
    pub fn triples(&self) -> Vec<Pattern> {
        let k = self.k();
        let mut out = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                for c in b + 1..k {
                    let pts = vec![
                        self.points[a].clone(),
                        self.points[b].clone(),
                        self.points[c].clone(),
                    ];
                    out.push(Pattern::new(self.d, pts).expect("sub-pattern of distinct points"));
                }
            }
        }
        out
    }

    /// Sub-pattern on the given point indices.
    pub fn subpattern(&self, indices: &[usize]) -> Result<Pattern> {
        let pts = indices.iter().map(|&i| self.points[i].clone()).collect();
        Pattern::new(self.d, pts)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if self.d == 1 {
                write!(f, "{}", p[0])?;
            } else {
                write!(f, "({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))?;
            }
        }
        write!(f, "}}")
    }
}

fn join(p: &[i64]) -> String {
    p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn is_primitive(d: usize, points: &[Vec<i64>]) -> bool {
    let min_zero = (0..d).all(|i| points.iter().map(|p| p[i]).min() == Some(0));
    let base = &points[0];
    let g = points
        .iter()
        .flat_map(|p| p.iter().zip(base).map(|(a, b)| (a - b).abs()))
        .fold(0i64, |acc, x| acc.gcd(&x));
    min_zero && g == 1
}

/// Parses the pattern file format: a header `d k`, then `k` lines of `d`
/// non-negative integers. Lines starting with `#` and blank lines are skipped.
pub fn parse_pattern(text: &str) -> Result<Pattern> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut points: Vec<Vec<i64>> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let nums: Vec<u64> = fields
            .iter()
            .map(|f| f.parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(line_no, ParseErrorKind::Malformed))?;
        match header {
            None => {
                if nums.len() != 2 || nums[0] == 0 || nums[1] == 0 {
                    return Err(Error::parse(line_no, ParseErrorKind::Malformed));
                }
                let (d, k) = (nums[0] as usize, nums[1] as usize);
                if k < 3 {
                    return Err(Error::parse(line_no, ParseErrorKind::TooFewPoints(k)));
                }
                header = Some((d, k, line_no));
            }
            Some((d, k, _)) => {
                if nums.len() != d {
                    return Err(Error::parse(
                        line_no,
                        ParseErrorKind::WrongArity { expected: d, found: nums.len() },
                    ));
                }
                if points.len() == k {
                    return Err(Error::parse(
                        line_no,
                        ParseErrorKind::CountMismatch { declared: k, found: k + 1 },
                    ));
                }
                let p: Vec<i64> = nums
                    .iter()
                    .map(|&x| i64::try_from(x))
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::parse(line_no, ParseErrorKind::Malformed))?;
                if !seen.insert(p.clone()) {
                    return Err(Error::parse(line_no, ParseErrorKind::DuplicatePoint));
                }
                points.push(p);
            }
        }
    }
    let Some((d, k, header_line)) = header else {
        return Err(Error::parse(last_line.max(1), ParseErrorKind::MissingHeader));
    };
    if points.len() != k {
        return Err(Error::parse(
            header_line,
            ParseErrorKind::CountMismatch { declared: k, found: points.len() },
        ));
    }
    Pattern::new(d, points)
}

/// Normalizes a pattern to its primitive representative.
pub fn normalize(p: &Pattern) -> Pattern {
    p.normalize()
}

/// SHA-256 over the canonical text of a primitive pattern, hex encoded.
pub fn pattern_hash(p: &Pattern) -> String {
    debug_assert!(p.is_primitive(), "pattern_hash expects a primitive pattern");
    let mut h = Sha256::new();
    h.update(p.to_text().as_bytes());
    hex::encode(h.finalize())
}

/// Three distinct rationals `a < b < c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalTriple {
    a: Rational,
    b: Rational,
    c: Rational,
}

impl RationalTriple {
    /// Sorts the three values; fails if any two coincide.
    pub fn new(x: Rational, y: Rational, z: Rational) -> Result<Self> {
        let mut v = [x, y, z];
        v.sort();
        if v[0] == v[1] || v[1] == v[2] {
            return Err(Error::InvalidArgument("triple entries must be distinct".into()));
        }
        let [a, b, c] = v;
        Ok(RationalTriple { a, b, c })
    }

    pub fn from_integers(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::new(
            Rational::from_integer(a as i128),
            Rational::from_integer(b as i128),
            Rational::from_integer(c as i128),
        )
    }

    /// The 1-D triple of a 1-D three-point pattern.
    pub fn from_pattern(p: &Pattern) -> Result<Self> {
        if p.d() != 1 || p.k() != 3 {
            return Err(Error::InvalidArgument(
                "a rational triple needs a 1-dimensional 3-point pattern".into(),
            ));
        }
        let v = p.points();
        Self::from_integers(v[0][0], v[1][0], v[2][0])
    }

    pub fn a(&self) -> Rational {
        self.a
    }
    pub fn b(&self) -> Rational {
        self.b
    }
    pub fn c(&self) -> Rational {
        self.c
    }

    /// The ratio `q` with `b − a = q·(c − b)`.
    pub fn q(&self) -> Rational {
        (self.b - self.a) / (self.c - self.b)
    }

    /// The similar primitive integer pattern.
    pub fn to_primitive(&self) -> Pattern {
        let lcm = [self.a, self.b, self.c]
            .iter()
            .fold(1i128, |acc, r| acc.lcm(r.denom()));
        let pts: Vec<Vec<i64>> = [self.a, self.b, self.c]
            .iter()
            .map(|r| {
                let v = (*r - self.a) * Rational::from_integer(lcm);
                debug_assert!(v.is_integer());
                vec![i64::try_from(v.to_integer()).expect("triple fits in i64")]
            })
            .collect();
        Pattern::new(1, pts).expect("distinct").normalize()
    }
}

impl fmt::Display for RationalTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// The primitive 1-D integer pattern similar to `{0, t, 1}`.
pub fn triple_to_primitive(t: Rational) -> Result<Pattern> {
    if t.is_zero() || t.is_one() {
        return Err(Error::InvalidArgument(format!("degenerate triple {{0, {t}, 1}}")));
    }
    Ok(RationalTriple::new(Rational::zero(), t, Rational::one())?.to_primitive())
}

/// Parses `p/q` or a plain integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidArgument(format!("not a rational: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}
