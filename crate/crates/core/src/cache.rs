//! On-disk store of `r_X(n)` records.
//!
//! A cache directory holds an append-only `records.txt` with lines
//! `<hash> <n> <lower> <upper> <0|1> <provenance>`, one `<hash>.pattern`
//! file per pattern and the largest known X-free set for each `(hash, n)`
//! in `<hash>_<n>.witness`.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use crate::behrend::{behrend_lift, LIFT_CAP};
use crate::copies::{is_x_free, primitive};
use crate::error::{Error, Result};
use crate::grid::{vertex_count, GridSet};
use crate::pattern::{parse_pattern, Pattern};
use crate::provider::{RProvider, RValue};
use crate::solver::{Provenance, RNumberRecord};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "XFREE_CACHE";

static APPEND_LOCK: Mutex<()> = Mutex::new(());

/// A parsed records line with its 1-based line number.
pub type NumberedLine = (usize, CacheLine);
/// A line number and the reason it failed to parse.
pub type BadLine = (usize, String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheLine {
    pub hash: String,
    pub n: u64,
    pub lower: u64,
    pub upper: u64,
    pub exact: bool,
    pub provenance: Provenance,
}

impl CacheLine {
    fn to_line(&self) -> String {
        format!(
            "{} {} {} {} {} {}",
            self.hash, self.n, self.lower, self.upper, self.exact as u8, self.provenance
        )
    }

    fn parse(s: &str) -> std::result::Result<Self, String> {
        let f: Vec<&str> = s.split_whitespace().collect();
        if f.len() != 6 {
            return Err(format!("expected 6 fields, found {}", f.len()));
        }
        let num = |x: &str| x.parse::<u64>().map_err(|_| format!("bad integer {x:?}"));
        let hash = f[0];
        if hash.len() != 64 || !hash.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(format!("bad pattern hash {hash:?}"));
        }
        let exact = match f[4] {
            "0" => false,
            "1" => true,
            x => return Err(format!("bad exact flag {x:?}")),
        };
        let provenance = f[5].parse::<Provenance>().map_err(|e| e.to_string())?;
        Ok(CacheLine {
            hash: hash.to_string(),
            n: num(f[1])?,
            lower: num(f[2])?,
            upper: num(f[3])?,
            exact,
            provenance,
        })
    }
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// Opens (creating if needed) a cache directory.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Cache { dir })
    }

    /// The directory from `XFREE_CACHE`, if set.
    pub fn from_env() -> Result<Option<Self>> {
        match std::env::var_os(CACHE_ENV) {
            Some(d) if !d.is_empty() => Cache::open(PathBuf::from(d)).map(Some),
            _ => Ok(None),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn records_path(&self) -> PathBuf {
        self.dir.join("records.txt")
    }

    fn pattern_path(&self, hash: &str) -> PathBuf {
        self.dir.join(format!("{hash}.pattern"))
    }

    fn witness_path(&self, hash: &str, n: u64) -> PathBuf {
        self.dir.join(format!("{hash}_{n}.witness"))
    }

    fn read_witness(&self, hash: &str, n: u64) -> Option<GridSet> {
        let text = fs::read_to_string(self.witness_path(hash, n)).ok()?;
        GridSet::parse_text(&text).ok()
    }

    fn read_pattern(&self, hash: &str) -> Option<Pattern> {
        let text = fs::read_to_string(self.pattern_path(hash)).ok()?;
        parse_pattern(&text).ok()
    }

    fn write_file(&self, path: &Path, text: &str) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    /// Appends a record. A witness must be X-free with exactly `lower`
    /// points; a larger stored witness is kept.
    pub fn store(&self, p: &Pattern, r: &RNumberRecord) -> Result<()> {
        let p = primitive(p);
        let hash = p.hash_id();
        if r.pattern_id != hash {
            return Err(Error::InvalidArgument("record belongs to a different pattern".into()));
        }
        if r.lower > r.upper {
            return Err(Error::InvalidArgument(format!(
                "lower bound {} exceeds upper bound {}",
                r.lower, r.upper
            )));
        }
        let _guard = APPEND_LOCK.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(w) = &r.witness {
            if w.len() as u64 != r.lower || w.n() != r.n || w.d() != p.d() || !is_x_free(w, &p) {
                return Err(Error::Precondition("witness fails verification".into()));
            }
            let keep_old = self
                .read_witness(&hash, r.n)
                .is_some_and(|old| old.len() >= w.len() && is_x_free(&old, &p));
            if !keep_old {
                self.write_file(&self.witness_path(&hash, r.n), &w.to_text())?;
            }
        }
        let pp = self.pattern_path(&hash);
        if !pp.exists() {
            self.write_file(&pp, &p.to_text())?;
        }
        let line = CacheLine {
            hash,
            n: r.n,
            lower: r.lower,
            upper: r.upper,
            exact: r.exact,
            provenance: r.provenance,
        };
        let path = self.records_path();
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        writeln!(f, "{}", line.to_line()).map_err(|e| Error::io(&path, e))
    }

    /// All parseable lines, and `(line number, reason)` for the rest.
    pub fn read_lines(&self) -> Result<(Vec<NumberedLine>, Vec<BadLine>)> {
        let path = self.records_path();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(Error::io(&path, e)),
        };
        let mut good = Vec::new();
        let mut bad = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match CacheLine::parse(line) {
                Ok(l) => good.push((i + 1, l)),
                Err(e) => bad.push((i + 1, e)),
            }
        }
        Ok((good, bad))
    }

    /// Best verified knowledge of `r_X(n)`.
    pub fn lookup(&self, p: &Pattern, n: u64) -> Result<Option<RNumberRecord>> {
        let p = primitive(p);
        let hash = p.hash_id();
        let (lines, _) = self.read_lines()?;
        let group: Vec<CacheLine> =
            lines.into_iter().map(|x| x.1).filter(|l| l.hash == hash && l.n == n).collect();
        if group.is_empty() {
            return Ok(None);
        }
        Ok(Some(self.consolidate(&p, &group).record))
    }

    fn consolidate(&self, p: &Pattern, group: &[CacheLine]) -> Consolidated {
        let (hash, n, d) = (&group[0].hash, group[0].n, p.d());
        let full = vertex_count(n, d).unwrap_or(u64::MAX);
        let witness = self
            .read_witness(hash, n)
            .filter(|w| w.n() == n && w.d() == d && is_x_free(w, p));
        let wsize = witness.as_ref().map_or(0, |w| w.len() as u64);
        let mut lower = wsize;
        let mut upper = full;
        let mut demoted = 0;
        let mut provenance = group[0].provenance;
        for l in group {
            let supported = l.lower <= wsize;
            if !supported {
                demoted += 1;
                continue;
            }
            if l.lower >= lower || l.exact {
                provenance = l.provenance;
            }
            lower = lower.max(l.lower);
            upper = upper.min(l.upper);
        }
        let consistent = lower <= upper;
        if !consistent {
            upper = full;
        }
        let exact = consistent && lower == upper;
        let witness = witness.filter(|_| lower > 0);
        Consolidated {
            record: RNumberRecord {
                pattern_id: hash.clone(),
                n,
                d,
                lower,
                upper,
                exact,
                witness,
                provenance,
            },
            demoted,
            consistent,
        }
    }

    /// Re-verifies every record, collapses duplicates and optionally
    /// rewrites `records.txt` with one line per `(pattern, n)`.
    pub fn roundtrip(&self, compact: bool) -> Result<CacheReport> {
        let (lines, corrupt) = self.read_lines()?;
        let mut groups: BTreeMap<(String, u64), Vec<CacheLine>> = BTreeMap::new();
        for (_, l) in &lines {
            groups.entry((l.hash.clone(), l.n)).or_default().push(l.clone());
        }
        let mut report = CacheReport {
            lines: lines.len(),
            corrupt,
            ..CacheReport::default()
        };
        for ((hash, n), group) in &groups {
            let Some(p) = self.read_pattern(hash) else {
                report.orphaned.push((hash.clone(), *n));
                continue;
            };
            let c = self.consolidate(&p, group);
            report.demoted += c.demoted;
            if !c.consistent {
                report.inconsistent.push((hash.clone(), *n));
            }
            if group.len() > 1 {
                report.merged.push((hash.clone(), *n));
            }
            report.records.push(c.record);
        }
        if compact {
            let _guard = APPEND_LOCK.lock().unwrap_or_else(|e| e.into_inner());
            let mut text = String::new();
            for r in &report.records {
                let l = CacheLine {
                    hash: r.pattern_id.clone(),
                    n: r.n,
                    lower: r.lower,
                    upper: r.upper,
                    exact: r.exact,
                    provenance: r.provenance,
                };
                text.push_str(&l.to_line());
                text.push('\n');
            }
            self.write_file(&self.records_path(), &text)?;
        }
        Ok(report)
    }
}

struct Consolidated {
    record: RNumberRecord,
    demoted: usize,
    consistent: bool,
}

#[derive(Debug, Clone, Default)]
pub struct CacheReport {
    pub lines: usize,
    /// One consolidated record per `(pattern, n)`.
    pub records: Vec<RNumberRecord>,
    /// Lines whose lower bound had no valid witness behind it.
    pub demoted: usize,
    pub merged: Vec<(String, u64)>,
    pub inconsistent: Vec<(String, u64)>,
    /// Records whose pattern file is missing or unreadable.
    pub orphaned: Vec<(String, u64)>,
    pub corrupt: Vec<(usize, String)>,
}

impl CacheReport {
    pub fn is_clean(&self) -> bool {
        self.demoted == 0
            && self.inconsistent.is_empty()
            && self.orphaned.is_empty()
            && self.corrupt.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "lines = {}\nrecords = {}\ndemoted = {}\nmerged = {}\ninconsistent = {}\norphaned = {}\ncorrupt = {}\n",
            self.lines,
            self.records.len(),
            self.demoted,
            self.merged.len(),
            self.inconsistent.len(),
            self.orphaned.len(),
            self.corrupt.len()
        );
        for (line, why) in &self.corrupt {
            s.push_str(&format!("corrupt line {line}: {why}\n"));
        }
        s.push_str(if self.is_clean() { "OK\n" } else { "ISSUES\n" });
        s
    }
}

/// Verifies a cache directory; see [`Cache::roundtrip`].
pub fn cache_roundtrip(dir: &Path, compact: bool) -> Result<CacheReport> {
    if !dir.is_dir() {
        return Err(Error::Precondition(format!("{} is not a directory", dir.display())));
    }
    Cache::open(dir)?.roundtrip(compact)
}

/// `r_X(n)` from an exact cache entry, then the Behrend lower bound, then
/// user values.
pub struct ChainProvider<'a> {
    pub cache: Option<&'a Cache>,
    pub behrend: bool,
    pub user: BTreeMap<u64, u64>,
}

impl RProvider for ChainProvider<'_> {
    fn r_value(&self, p: &Pattern, n: u64) -> Result<RValue> {
        if let Some(c) = self.cache {
            if let Some(r) = c.lookup(p, n)? {
                if r.exact {
                    return Ok(RValue::from(&r));
                }
            }
        }
        if self.behrend && vertex_count(n, p.d()).is_some_and(|v| v <= LIFT_CAP) {
            let cert = behrend_lift(p, n, false)?;
            return Ok(RValue { value: cert.set_size(), exact: false, provenance: Provenance::Behrend });
        }
        self.user.get(&n).map(|&v| RValue::user(v)).ok_or(Error::ProviderMiss(n))
    }
}
