//! C ABI for pamlab.
//!
//! Every fallible function returns a [`PamlabStatus`]. On failure the message
//! is kept in a thread-local slot and can be fetched with
//! [`pamlab_last_error_message`]. Rationals cross the boundary as
//! NUL-terminated strings such as `"3/2"` or `"-1"`. Strings returned by the
//! library must be released with [`pamlab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pamlab::beta::{digit_stream, BetaSystem, TdsAnswer, Variant};
use pamlab::error::Error;
use pamlab::exactnum::{format_rational, parse_rational, Rational};
use pamlab::pam::{iterate_orbit, OrbitVerdict, PamMap};
use pamlab::reach::{decide_auto, ReachOutcome};
use pamlab::seqlab::theorem5_scan;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PamlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    Validation = 4,
    InvalidArgument = 5,
    Domain = 6,
    Internal = 7,
}

/// Opaque handle to a validated map.
pub struct PamlabMap {
    inner: PamMap,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PamlabReachKind {
    Reached = 0,
    UnreachableCycle = 1,
    UnreachableWeight = 2,
    Unknown = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PamlabReachResult {
    pub kind: PamlabReachKind,
    /// Step at which the target was hit. Meaningful only for `Reached`.
    pub step: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PamlabOrbitKind {
    Hit = 0,
    Cycle = 1,
    CapExceeded = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PamlabOrbitResult {
    pub kind: PamlabOrbitKind,
    pub preperiod: usize,
    pub period: usize,
    /// Number of orbit points computed, including the starting point.
    pub points: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PamlabVariant {
    Greedy = 0,
    Lazy = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PamlabTdsKind {
    Yes = 0,
    No = 1,
    Unknown = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PamlabTdsResult {
    pub kind: PamlabTdsKind,
    /// For `No`: the step where a digit outside {0, 1} appeared.
    pub step: usize,
    /// For `No`: the offending digit.
    pub digit: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(e: &Error) -> PamlabStatus {
    match e {
        Error::Syntax { .. } | Error::Json(_) | Error::InvalidRational(_) => PamlabStatus::Syntax,
        Error::ValidationFailed(_) => PamlabStatus::Validation,
        Error::PointOutsideDomain(_) | Error::PointInCoverageGap(_) => PamlabStatus::Domain,
        Error::Io(_) | Error::Csv(_) => PamlabStatus::Internal,
        _ => PamlabStatus::InvalidArgument,
    }
}

struct Failure(PamlabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `body`, records any error or panic, and converts it to a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> PamlabStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PamlabStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            PamlabStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(PamlabStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(PamlabStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn read_rational(p: *const c_char, what: &str) -> Result<Rational, Failure> {
    Ok(parse_rational(read_str(p, what)?)?)
}

unsafe fn map_ref<'a>(map: *const PamlabMap) -> Result<&'a PamMap, Failure> {
    map.as_ref()
        .map(|m| &m.inner)
        .ok_or_else(|| Failure(PamlabStatus::NullPointer, "map is null".to_string()))
}

fn null_out(what: &str) -> Failure {
    Failure(PamlabStatus::NullPointer, format!("{what} is null"))
}

/// Parses and validates a JSON map document. On success `*out` owns a new
/// handle that must be released with [`pamlab_map_free`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pamlab_map_from_json(json: *const c_char, out: *mut *mut PamlabMap) -> PamlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out("out"));
        }
        *out = ptr::null_mut();
        let map = pamlab::cli::parse_pam_file(read_str(json, "json")?)?;
        *out = Box::into_raw(Box::new(PamlabMap { inner: map }));
        Ok(())
    })
}

/// Releases a map handle. Passing null is a no-op.
///
/// # Safety
/// `map` must come from [`pamlab_map_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pamlab_map_free(map: *mut PamlabMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Number of pieces in the map, or 0 for a null handle.
///
/// # Safety
/// `map` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pamlab_map_piece_count(map: *const PamlabMap) -> usize {
    map.as_ref().map_or(0, |m| m.inner.pieces.len())
}

/// Evaluates the map at `x`. On success `*out` holds the image as a string.
///
/// # Safety
/// Pointers must be valid; `x` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pamlab_map_eval(
    map: *const PamlabMap,
    x: *const c_char,
    out: *mut *mut c_char,
) -> PamlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out("out"));
        }
        *out = ptr::null_mut();
        let map = map_ref(map)?;
        let x = read_rational(x, "x")?;
        let (_, y) = map.step(&x)?;
        *out = CString::new(format_rational(&y)).unwrap().into_raw();
        Ok(())
    })
}

/// Decides whether `y` lies on the orbit of `x`, choosing the strongest
/// applicable decider. `cap` bounds the number of simulated steps.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pamlab_reach(
    map: *const PamlabMap,
    x: *const c_char,
    y: *const c_char,
    cap: usize,
    out: *mut PamlabReachResult,
) -> PamlabStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null_out("out"))?;
        let map = map_ref(map)?;
        let (x, y) = (read_rational(x, "x")?, read_rational(y, "y")?);
        let v = decide_auto(map, &x, &y, cap, None)?;
        *out = match v.outcome {
            ReachOutcome::Reached { step } => PamlabReachResult { kind: PamlabReachKind::Reached, step },
            ReachOutcome::UnreachableCycle => PamlabReachResult { kind: PamlabReachKind::UnreachableCycle, step: 0 },
            ReachOutcome::UnreachableWeight => PamlabReachResult { kind: PamlabReachKind::UnreachableWeight, step: 0 },
            ReachOutcome::Unknown(_) => PamlabReachResult { kind: PamlabReachKind::Unknown, step: 0 },
        };
        Ok(())
    })
}

/// Iterates the map from `x0` for at most `cap` steps and reports how the
/// orbit ended.
///
/// # Safety
/// Pointers must be valid; `x0` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pamlab_orbit(
    map: *const PamlabMap,
    x0: *const c_char,
    cap: usize,
    out: *mut PamlabOrbitResult,
) -> PamlabStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null_out("out"))?;
        let map = map_ref(map)?;
        let rec = iterate_orbit(map, &read_rational(x0, "x0")?, cap, None)?;
        let points = rec.points.len();
        *out = match rec.verdict {
            OrbitVerdict::Hit { step } => PamlabOrbitResult { kind: PamlabOrbitKind::Hit, preperiod: step, period: 0, points },
            OrbitVerdict::Cycle { preperiod, period } => {
                PamlabOrbitResult { kind: PamlabOrbitKind::Cycle, preperiod, period, points }
            }
            OrbitVerdict::CapExceeded => PamlabOrbitResult { kind: PamlabOrbitKind::CapExceeded, preperiod: 0, period: 0, points },
        };
        Ok(())
    })
}

/// Writes the first `len` digits of the beta-expansion of `x` into `digits`.
///
/// # Safety
/// `digits` must point to at least `len` writable `u64` values.
#[no_mangle]
pub unsafe extern "C" fn pamlab_beta_digits(
    beta: *const c_char,
    variant: PamlabVariant,
    x: *const c_char,
    digits: *mut u64,
    len: usize,
) -> PamlabStatus {
    guard(|| {
        if digits.is_null() && len > 0 {
            return Err(null_out("digits"));
        }
        let system = BetaSystem::new(read_rational(beta, "beta")?)?;
        let variant = match variant {
            PamlabVariant::Greedy => Variant::Greedy,
            PamlabVariant::Lazy => Variant::Lazy,
        };
        let seq = digit_stream(&system, variant, &read_rational(x, "x")?, len)?;
        if len > 0 {
            std::slice::from_raw_parts_mut(digits, len).copy_from_slice(&seq.digits[..len]);
        }
        Ok(())
    })
}

/// Decides whether `x` has an expansion in base `beta` using only digits 0
/// and 1, following the greedy orbit for at most `depth` steps.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pamlab_tds(
    beta: *const c_char,
    x: *const c_char,
    depth: usize,
    out: *mut PamlabTdsResult,
) -> PamlabStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null_out("out"))?;
        let ans = pamlab::beta::tds01_decide(&read_rational(beta, "beta")?, &read_rational(x, "x")?, depth)?;
        *out = match ans {
            TdsAnswer::Yes(_) => PamlabTdsResult { kind: PamlabTdsKind::Yes, step: 0, digit: 0 },
            TdsAnswer::No { step, digit } => PamlabTdsResult { kind: PamlabTdsKind::No, step, digit },
            TdsAnswer::Unknown => PamlabTdsResult { kind: PamlabTdsKind::Unknown, step: 0, digit: 0 },
        };
        Ok(())
    })
}

/// Scans `n = 0..=n_max` with the truncation index `index` and stores the
/// number of rows satisfying the bound in `*passed`.
///
/// # Safety
/// `passed` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pamlab_theorem5_check(n_max: u64, index: u32, passed: *mut u64) -> PamlabStatus {
    guard(|| {
        let passed = passed.as_mut().ok_or_else(|| null_out("passed"))?;
        let rows = theorem5_scan(n_max, index)?;
        *passed = rows.iter().filter(|r| r.passes).count() as u64;
        Ok(())
    })
}

/// Copy of the last error message on this thread, or null if the last call
/// succeeded. Release with [`pamlab_string_free`].
#[no_mangle]
pub extern "C" fn pamlab_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Releases a string returned by this library. Passing null is a no-op.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pamlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
