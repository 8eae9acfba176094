//! C interface to the `bogomolov` library.
//!
//! Objects are opaque handles released with their `_free` function. Every
//! fallible call returns a [`BgStatus`]; the message of the most recent
//! failure on the calling thread is available from
//! [`bg_last_error_message`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bogomolov::extension::{PairStrategy, TailMode};
use bogomolov::multiplier::{bogomolov_multiplier, schur_multiplier, MultiplierOptions, MultiplierReport};
use bogomolov::presentation::{parse_presentation_at, Presentation, PresentationTemplate, PrimeSpec};
use bogomolov::{catalog, Error};

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidPrime = 4,
    UnknownEntry = 5,
    InvalidPresentation = 6,
    Inconsistent = 7,
    Budget = 8,
    Overflow = 9,
    FreeRankMismatch = 10,
    BufferTooSmall = 11,
    Internal = 12,
}

/// Tail attachment mode.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BgTailMode {
    Reduced = 0,
    Full = 1,
}

/// Commuting-pair enumeration strategy.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BgStrategy {
    CenterReduced = 0,
    Full = 1,
}

/// A validated presentation.
pub struct BgPresentation {
    inner: Presentation,
}

/// The outcome of a Bogomolov multiplier computation.
pub struct BgReport {
    inner: MultiplierReport,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BgStatus {
    match e {
        Error::Parse(_) | Error::MissingParameter(_) | Error::PrimeNotFixed => BgStatus::Parse,
        Error::InvalidPrime(_) => BgStatus::InvalidPrime,
        Error::UnknownEntry(_) | Error::NotLoadable(_) => BgStatus::UnknownEntry,
        Error::Invalid(_) | Error::ClassTooLarge(_) | Error::SampledStrategy => BgStatus::InvalidPresentation,
        Error::Inconsistent(_) => BgStatus::Inconsistent,
        Error::CollectionBudget(_) | Error::EnumerationBudget { .. } => BgStatus::Budget,
        Error::TailOverflow => BgStatus::Overflow,
        Error::FreeRankMismatch { .. } => BgStatus::FreeRankMismatch,
        Error::Defect(_) => BgStatus::Internal,
    }
}

fn fail(e: Error) -> BgStatus {
    set_error(&e.to_string());
    status_of(&e)
}

/// Runs `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> BgStatus) -> BgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            BgStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, BgStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(BgStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        BgStatus::InvalidUtf8
    })
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn bg_status_name(status: BgStatus) -> *const c_char {
    let s: &'static CStr = match status {
        BgStatus::Ok => c"ok",
        BgStatus::NullArgument => c"null argument",
        BgStatus::InvalidUtf8 => c"invalid utf-8",
        BgStatus::Parse => c"parse error",
        BgStatus::InvalidPrime => c"invalid prime",
        BgStatus::UnknownEntry => c"unknown catalog entry",
        BgStatus::InvalidPresentation => c"invalid presentation",
        BgStatus::Inconsistent => c"inconsistent presentation",
        BgStatus::Budget => c"budget exceeded",
        BgStatus::Overflow => c"tail overflow",
        BgStatus::FreeRankMismatch => c"free rank mismatch",
        BgStatus::BufferTooSmall => c"buffer too small",
        BgStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// Parses presentation text. A `prime` of 0 uses the prime fixed in the text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_presentation_parse(
    text: *const c_char,
    prime: u64,
    out: *mut *mut BgPresentation,
) -> BgStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return BgStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let template = match PresentationTemplate::parse(text) {
            Ok(t) => t,
            Err(e) => return fail(e.into()),
        };
        let prime = match (prime, &template.prime) {
            (0, PrimeSpec::Fixed(p)) => *p,
            (0, PrimeSpec::Symbolic(_)) => return fail(Error::PrimeNotFixed),
            (p, _) => p,
        };
        match parse_presentation_at(text, prime, &BTreeMap::new()) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(BgPresentation { inner: p }));
                BgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Loads a catalog entry, with default parameter values.
///
/// # Safety
/// `id` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_presentation_from_catalog(
    id: *const c_char,
    prime: u64,
    out: *mut *mut BgPresentation,
) -> BgStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return BgStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let id = match read_str(id) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match catalog::load_entry_with_defaults(id, prime, &BTreeMap::new()) {
            Ok((p, _)) => {
                *out = Box::into_raw(Box::new(BgPresentation { inner: p }));
                BgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of generators, or 0 for a null handle.
///
/// # Safety
/// `pres` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bg_presentation_generator_count(pres: *const BgPresentation) -> usize {
    pres.as_ref().map_or(0, |p| p.inner.n())
}

/// Prime of the presentation, or 0 for a null handle.
///
/// # Safety
/// `pres` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bg_presentation_prime(pres: *const BgPresentation) -> u32 {
    pres.as_ref().map_or(0, |p| p.inner.prime)
}

/// # Safety
/// `pres` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_presentation_free(pres: *mut BgPresentation) {
    if !pres.is_null() {
        drop(Box::from_raw(pres));
    }
}

/// Computes the Bogomolov multiplier.
///
/// # Safety
/// `pres` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_bogomolov(
    pres: *const BgPresentation,
    mode: BgTailMode,
    strategy: BgStrategy,
    out: *mut *mut BgReport,
) -> BgStatus {
    guard(|| {
        if out.is_null() || pres.is_null() {
            set_error("null argument");
            return BgStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let opts = MultiplierOptions {
            mode: match mode {
                BgTailMode::Reduced => TailMode::Reduced,
                BgTailMode::Full => TailMode::Full,
            },
            strategy: match strategy {
                BgStrategy::CenterReduced => PairStrategy::CenterReduced,
                BgStrategy::Full => PairStrategy::Full,
            },
            ..Default::default()
        };
        match bogomolov_multiplier(&(*pres).inner, &opts) {
            Ok(mut r) => {
                r.timings_ms = None;
                let json = serde_json::to_string(&r).expect("serializable");
                let json = CString::new(json).expect("no NUL in JSON");
                *out = Box::into_raw(Box::new(BgReport { inner: r, json }));
                BgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of torsion invariants; 0 means trivial.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bg_report_invariant_count(report: *const BgReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.bogomolov.invariants.len())
}

/// Invariant `index`, or 0 when out of range.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bg_report_invariant(report: *const BgReport, index: usize) -> u64 {
    report.as_ref().and_then(|r| r.inner.bogomolov.invariants.get(index).copied()).unwrap_or(0)
}

/// Free rank of the tail quotient.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bg_report_free_rank(report: *const BgReport) -> usize {
    report.as_ref().and_then(|r| r.inner.free_rank).unwrap_or(0)
}

/// JSON form of the report, owned by the handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bg_report_json(report: *const BgReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_report_free(report: *mut BgReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Schur multiplier invariants written to `buf`; `len` receives the count.
/// Returns `BufferTooSmall` with `len` set when `cap` is insufficient.
///
/// # Safety
/// `pres` must be a live handle, `len` valid, and `buf` valid for `cap`
/// writes (it may be null when `cap` is 0).
#[no_mangle]
pub unsafe extern "C" fn bg_schur(pres: *const BgPresentation, buf: *mut u64, cap: usize, len: *mut usize) -> BgStatus {
    guard(|| {
        if pres.is_null() || len.is_null() || (buf.is_null() && cap > 0) {
            set_error("null argument");
            return BgStatus::NullArgument;
        }
        let inv = match schur_multiplier(&(*pres).inner).and_then(|t| t.torsion_u64()) {
            Ok(v) => v,
            Err(e) => return fail(e),
        };
        *len = inv.len();
        if inv.len() > cap {
            set_error("buffer too small");
            return BgStatus::BufferTooSmall;
        }
        for (k, v) in inv.iter().enumerate() {
            *buf.add(k) = *v;
        }
        BgStatus::Ok
    })
}
