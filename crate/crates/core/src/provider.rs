//! Sources of `r_X(n)` values for the parameter formulas.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::solver::{Provenance, RNumberRecord};

/// A value standing in for `r_X(n)`, with where it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RValue {
    pub value: u64,
    pub exact: bool,
    pub provenance: Provenance,
}

impl RValue {
    pub fn user(value: u64) -> Self {
        RValue { value, exact: false, provenance: Provenance::User }
    }

    pub fn exact(value: u64, provenance: Provenance) -> Self {
        RValue { value, exact: true, provenance }
    }
}

impl From<&RNumberRecord> for RValue {
    /// Exact value, or the best lower bound.
    fn from(r: &RNumberRecord) -> Self {
        RValue { value: r.lower, exact: r.exact, provenance: r.provenance }
    }
}

pub trait RProvider {
    fn r_value(&self, p: &Pattern, n: u64) -> Result<RValue>;
}

/// Fixed values per `n`.
#[derive(Debug, Clone, Default)]
pub struct TableProvider {
    pub table: BTreeMap<u64, RValue>,
}

impl TableProvider {
    pub fn new(table: BTreeMap<u64, RValue>) -> Self {
        TableProvider { table }
    }

    /// Exact values from a list of solver records.
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a RNumberRecord>) -> Self {
        TableProvider {
            table: records.into_iter().map(|r| (r.n, RValue::from(r))).collect(),
        }
    }
}

impl RProvider for TableProvider {
    fn r_value(&self, _p: &Pattern, n: u64) -> Result<RValue> {
        self.table.get(&n).copied().ok_or(Error::ProviderMiss(n))
    }
}

/// User-supplied formula; values carry `Provenance::User`.
pub struct FnProvider<F>(pub F);

impl<F: Fn(u64) -> Option<u64>> RProvider for FnProvider<F> {
    fn r_value(&self, _p: &Pattern, n: u64) -> Result<RValue> {
        (self.0)(n).map(RValue::user).ok_or(Error::ProviderMiss(n))
    }
}
