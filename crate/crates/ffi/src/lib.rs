//! C ABI for `xfree-core`.
//!
//! Patterns and sets are opaque handles created and destroyed through this
//! interface. Every fallible function returns an [`XfStatus`]; the message
//! of the most recent failure on the calling thread is available from
//! [`xf_last_error`]. Panics are caught at the boundary and reported as
//! `XF_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use xfree_core::behrend::behrend_1d;
use xfree_core::container::delta_tau_value;
use xfree_core::primes::{prime_pi, verify_pnt_constant, SIEVE_CAP};
use xfree_core::solver::{CountOptions, SolveOptions};
use xfree_core::{Error, GridSet, Pattern, RationalTriple};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XfStatus {
    Ok = 0,
    NullPointer = 1,
    Utf8 = 2,
    Parse = 3,
    Precondition = 4,
    Budget = 5,
    InvalidArgument = 6,
    Io = 7,
    Overflow = 8,
    Panic = 9,
}

/// Opaque pattern handle.
pub struct XfPattern(Pattern);

/// Opaque handle to a subset of `[n]^d`.
pub struct XfGridSet(GridSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> XfStatus {
    match e {
        Error::Parse { .. } => XfStatus::Parse,
        Error::Precondition(_) | Error::ProviderMiss(_) => XfStatus::Precondition,
        Error::Budget { .. } => XfStatus::Budget,
        Error::InvalidArgument(_) => XfStatus::InvalidArgument,
        Error::Io { .. } => XfStatus::Io,
    }
}

struct Fail(XfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> XfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => XfStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            XfStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(XfStatus::NullPointer, "null pointer argument".into())
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn xf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a pattern from the text format (`d k` header, then points).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xf_pattern_parse(text: *const c_char, out: *mut *mut XfPattern) -> XfStatus {
    guard(|| {
        if text.is_null() {
            return Err(null());
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Fail(XfStatus::Utf8, e.to_string()))?;
        let p = xfree_core::parse_pattern(s)?;
        write(out, Box::into_raw(Box::new(XfPattern(p))))
    })
}

/// The progression `{0, 1, …, k − 1}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xf_pattern_progression(k: usize, out: *mut *mut XfPattern) -> XfStatus {
    guard(|| {
        if k < 3 {
            return Err(Fail(XfStatus::InvalidArgument, "k must be at least 3".into()));
        }
        write(out, Box::into_raw(Box::new(XfPattern(Pattern::progression(k)))))
    })
}

/// The corner `{0, e_1, …, e_d}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xf_pattern_corner(d: usize, out: *mut *mut XfPattern) -> XfStatus {
    guard(|| {
        if d < 2 {
            return Err(Fail(XfStatus::InvalidArgument, "d must be at least 2".into()));
        }
        write(out, Box::into_raw(Box::new(XfPattern(Pattern::corner(d)))))
    })
}

/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xf_pattern_free(p: *mut XfPattern) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of points, or 0 for null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xf_pattern_size(p: *const XfPattern) -> usize {
    p.as_ref().map_or(0, |p| p.0.k())
}

/// Dimension, or 0 for null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xf_pattern_dim(p: *const XfPattern) -> usize {
    p.as_ref().map_or(0, |p| p.0.d())
}

/// An empty subset of `[n]^d`, or the full grid when `full` is nonzero.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xf_gridset_new(n: u64, d: usize, full: i32, out: *mut *mut XfGridSet) -> XfStatus {
    guard(|| {
        let g = if full != 0 { GridSet::full(n, d)? } else { GridSet::empty(n, d)? };
        write(out, Box::into_raw(Box::new(XfGridSet(g))))
    })
}

/// Inserts the point `coords[0..d]` (1-based coordinates).
///
/// # Safety
/// `set` must be a live handle and `coords` must point to `d` integers.
#[no_mangle]
pub unsafe extern "C" fn xf_gridset_insert(set: *mut XfGridSet, coords: *const i64) -> XfStatus {
    guard(|| {
        let g = set.as_mut().ok_or_else(null)?;
        if coords.is_null() {
            return Err(null());
        }
        let pt = std::slice::from_raw_parts(coords, g.0.d());
        g.0.insert(pt)?;
        Ok(())
    })
}

/// Number of points, or 0 for null.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xf_gridset_len(set: *const XfGridSet) -> u64 {
    set.as_ref().map_or(0, |g| g.0.len() as u64)
}

/// Nonzero iff the point `coords[0..d]` is in the set.
///
/// # Safety
/// `set` must be a live handle and `coords` must point to `d` integers.
#[no_mangle]
pub unsafe extern "C" fn xf_gridset_contains(set: *const XfGridSet, coords: *const i64) -> i32 {
    match (set.as_ref(), coords.is_null()) {
        (Some(g), false) => g.0.contains(std::slice::from_raw_parts(coords, g.0.d())) as i32,
        _ => 0,
    }
}

/// # Safety
/// `set` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xf_gridset_free(set: *mut XfGridSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// `Γ_X(A)`, the number of copies of the pattern inside the set.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xf_gamma_count(set: *const XfGridSet, p: *const XfPattern, out: *mut u64) -> XfStatus {
    guard(|| {
        let (g, p) = (deref(set)?, deref(p)?);
        if g.0.d() != p.0.d() {
            return Err(Fail(XfStatus::InvalidArgument, "dimension mismatch".into()));
        }
        let c = xfree_core::gamma_count(&g.0, &p.0);
        let c = u64::try_from(c).map_err(|_| Fail(XfStatus::Overflow, format!("{c} exceeds u64")))?;
        write(out, c)
    })
}

/// Bounds on `r_X(n)`. `exact` is set to 1 when `lower == upper` was
/// proven; a `node_budget` of 0 uses the default.
///
/// # Safety
/// `p` must be live; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn xf_solve_rx(
    p: *const XfPattern,
    n: u64,
    workers: usize,
    node_budget: u64,
    lower: *mut u64,
    upper: *mut u64,
    exact: *mut i32,
) -> XfStatus {
    guard(|| {
        let p = deref(p)?;
        let mut opts = SolveOptions { workers: workers.max(1), ..SolveOptions::default() };
        if node_budget > 0 {
            opts.node_budget = node_budget;
        }
        let r = xfree_core::solve_rx_exact(&p.0, n, &opts)?;
        write(lower, r.lower)?;
        write(upper, r.upper)?;
        write(exact, r.exact as i32)
    })
}

/// Number of X-free subsets of `[n]^d` as a decimal string, to be released
/// with [`xf_string_free`].
///
/// # Safety
/// `p` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xf_count_free(p: *const XfPattern, n: u64, out: *mut *mut c_char) -> XfStatus {
    guard(|| {
        let p = deref(p)?;
        let r = xfree_core::count_xfree_subsets(&p.0, n, &CountOptions::default())?;
        let s = CString::new(r.count_decimal()).expect("digits contain no NUL");
        write(out, s.into_raw())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `π(l)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xf_prime_pi(l: u64, out: *mut u64) -> XfStatus {
    guard(|| write(out, prime_pi(l, SIEVE_CAP)?))
}

/// Checks `π(ℓ) ≥ ℓ/(2 ln ℓ)` on `[l0, lmax]`. On failure `first_violation`
/// receives the first bad `ℓ`, otherwise 0.
///
/// # Safety
/// Output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn xf_verify_pnt(l0: u64, lmax: u64, holds: *mut i32, first_violation: *mut u64) -> XfStatus {
    guard(|| {
        let r = verify_pnt_constant(l0, lmax, SIEVE_CAP)?;
        write(holds, r.holds as i32)?;
        write(first_violation, r.first_violation.unwrap_or(0))
    })
}

/// The sphere-shell set in `[n]` free of the triple `{a, b, c}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xf_behrend_1d(a: i64, b: i64, c: i64, n: u64, out: *mut *mut XfGridSet) -> XfStatus {
    guard(|| {
        let t = RationalTriple::from_integers(a, b, c)?;
        let cert = behrend_1d(&t, n)?;
        write(out, Box::into_raw(Box::new(XfGridSet(cert.to_gridset()?))))
    })
}

/// `Δ(H,τ)` from co-degrees `Δ_2..Δ_k` (`len = k − 1`) and the average
/// degree.
///
/// # Safety
/// `codegrees` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xf_delta_tau(
    codegrees: *const f64,
    len: usize,
    avg_degree: f64,
    tau: f64,
    out: *mut f64,
) -> XfStatus {
    guard(|| {
        if codegrees.is_null() {
            return Err(null());
        }
        let cd = std::slice::from_raw_parts(codegrees, len);
        write(out, delta_tau_value(len + 1, cd, avg_degree, tau)?)
    })
}
