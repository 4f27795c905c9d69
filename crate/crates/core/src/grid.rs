//! Dense bit-indexed subsets of `[n]^d`.
//!
//! A point `x ∈ [n]^d` (coordinates 1-based) has index
//! `Σ (x_i − 1)·n^(i−1)`, so the first coordinate varies fastest.

use crate::error::{Error, ParseErrorKind, Result};

/// Hard ceiling on `n^d` for anything materialized as a bitset.
pub const MAX_VERTICES: u64 = 1 << 32;

/// `n^d`, or `None` on overflow.
pub fn vertex_count(n: u64, d: usize) -> Option<u64> {
    let mut v: u64 = 1;
    for _ in 0..d {
        v = v.checked_mul(n)?;
    }
    Some(v)
}

#[derive(Clone, PartialEq, Eq)]
pub struct GridSet {
    n: u64,
    d: usize,
    words: Vec<u64>,
    size: usize,
}

impl std::fmt::Debug for GridSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridSet")
            .field("n", &self.n)
            .field("d", &self.d)
            .field("size", &self.size)
            .finish()
    }
}

impl GridSet {
    pub fn empty(n: u64, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let v = vertex_count(n, d)
            .filter(|&v| v <= MAX_VERTICES)
            .ok_or(Error::Budget { what: "grid vertices n^d", cap: MAX_VERTICES })?;
        Ok(GridSet { n, d, words: vec![0; (v as usize).div_ceil(64)], size: 0 })
    }

    pub fn full(n: u64, d: usize) -> Result<Self> {
        let mut g = Self::empty(n, d)?;
        let v = g.vertex_count() as usize;
        for w in 0..v / 64 {
            g.words[w] = u64::MAX;
        }
        if !v.is_multiple_of(64) {
            g.words[v / 64] = (1u64 << (v % 64)) - 1;
        }
        g.size = v;
        Ok(g)
    }

    /// Builds a set from 1-based points; every point must lie in `[n]^d`.
    pub fn from_points<P: AsRef<[i64]>>(
        n: u64,
        d: usize,
        points: impl IntoIterator<Item = P>,
    ) -> Result<Self> {
        let mut g = Self::empty(n, d)?;
        for p in points {
            let p = p.as_ref();
            let idx = g.index_of(p).ok_or_else(|| {
                Error::InvalidArgument(format!("point {p:?} is not in [{n}]^{d}"))
            })?;
            g.insert_index(idx);
        }
        Ok(g)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn vertex_count(&self) -> u64 {
        vertex_count(self.n, self.d).unwrap()
    }

    /// Index of a 1-based point, or `None` if it lies outside the grid.
    pub fn index_of(&self, p: &[i64]) -> Option<usize> {
        if p.len() != self.d {
            return None;
        }
        let n = self.n as i64;
        let mut idx: usize = 0;
        let mut stride: usize = 1;
        for &x in p {
            if x < 1 || x > n {
                return None;
            }
            idx += (x - 1) as usize * stride;
            stride *= self.n as usize;
        }
        Some(idx)
    }

    /// 1-based point at an index.
    pub fn point_of(&self, mut idx: usize) -> Vec<i64> {
        let n = self.n as usize;
        (0..self.d)
            .map(|_| {
                let c = idx % n;
                idx /= n;
                c as i64 + 1
            })
            .collect()
    }

    #[inline]
    pub fn contains_index(&self, idx: usize) -> bool {
        self.words[idx >> 6] >> (idx & 63) & 1 == 1
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.index_of(p).is_some_and(|i| self.contains_index(i))
    }

    /// Returns true if the index was newly inserted.
    pub fn insert_index(&mut self, idx: usize) -> bool {
        let (w, b) = (idx >> 6, 1u64 << (idx & 63));
        let fresh = self.words[w] & b == 0;
        if fresh {
            self.words[w] |= b;
            self.size += 1;
        }
        fresh
    }

    pub fn remove_index(&mut self, idx: usize) -> bool {
        let (w, b) = (idx >> 6, 1u64 << (idx & 63));
        let present = self.words[w] & b != 0;
        if present {
            self.words[w] &= !b;
            self.size -= 1;
        }
        present
    }

    pub fn insert(&mut self, p: &[i64]) -> Result<bool> {
        let idx = self
            .index_of(p)
            .ok_or_else(|| Error::InvalidArgument(format!("point {p:?} is outside the grid")))?;
        Ok(self.insert_index(idx))
    }

    /// Set indices in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + t)
            })
        })
    }

    /// Member points in lexicographic order.
    pub fn points_sorted(&self) -> Vec<Vec<i64>> {
        let mut pts: Vec<Vec<i64>> = self.indices().map(|i| self.point_of(i)).collect();
        pts.sort();
        pts
    }

    /// Serializes as `# n=<n> d=<d>` followed by sorted points.
    pub fn to_text(&self) -> String {
        let mut s = format!("# n={} d={}\n", self.n, self.d);
        for p in self.points_sorted() {
            let line: Vec<String> = p.iter().map(|x| x.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (n, d) = loop {
            let Some((i, raw)) = lines.next() else {
                return Err(Error::parse(1, ParseErrorKind::MissingHeader));
            };
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            break parse_header(line).ok_or(Error::parse(i + 1, ParseErrorKind::MissingHeader))?;
        };
        let mut g = GridSet::empty(n, d)?;
        for (i, raw) in lines {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let p: Vec<i64> = line
                .split_whitespace()
                .map(|f| f.parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(i + 1, ParseErrorKind::Malformed))?;
            if p.len() != d {
                return Err(Error::parse(
                    i + 1,
                    ParseErrorKind::WrongArity { expected: d, found: p.len() },
                ));
            }
            let idx = g.index_of(&p).ok_or(Error::parse(i + 1, ParseErrorKind::OutOfRange))?;
            if !g.insert_index(idx) {
                return Err(Error::parse(i + 1, ParseErrorKind::DuplicatePoint));
            }
        }
        Ok(g)
    }
}

fn parse_header(line: &str) -> Option<(u64, usize)> {
    let rest = line.strip_prefix('#')?;
    let mut n = None;
    let mut d = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            n = v.parse().ok();
        } else if let Some(v) = tok.strip_prefix("d=") {
            d = v.parse().ok();
        }
    }
    Some((n?, d?))
}
