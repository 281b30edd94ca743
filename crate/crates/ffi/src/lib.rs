//! C interface to `pfiber`.
//!
//! Braids live behind the opaque `PfBraid` handle. Every fallible call returns
//! a `PfStatus`; on failure the message is kept per thread and can be fetched
//! with `pf_last_error`. Strings handed out by this library are released with
//! `pf_string_free`, handles with `pf_braid_free`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::c_char;
use pfiber::braidword::{homogenize, twist_bound, BraidWord};
use pfiber::curves::{library, satellite, ParamBraid};
use pfiber::fibercheck::{check, CheckOptions};
use pfiber::wordextract::{extract_word, ExtractOptions};
use pfiber::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed word, braid, JSON or option.
    InvalidInput = 3,
    /// Root finding, tracking or projection broke down.
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

/// Opaque parametrized braid.
pub struct PfBraid(ParamBraid);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> PfStatus {
    match e {
        Error::NonConvergence { .. }
        | Error::TrackingFailure { .. }
        | Error::NonGeneric { .. }
        | Error::StrandCollision { .. }
        | Error::CompanionNotFibered(_) => PfStatus::Numerical,
        Error::Io(_) => PfStatus::Io,
        _ => PfStatus::InvalidInput,
    }
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), PfStatus>) -> PfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PfStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            PfStatus::Panic
        }
    }
}

fn fail(e: Error) -> PfStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, PfStatus> {
    if p.is_null() {
        set_error("null string argument".into());
        return Err(PfStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".into());
        PfStatus::InvalidUtf8
    })
}

unsafe fn braid_ref<'a>(b: *const PfBraid) -> Result<&'a ParamBraid, PfStatus> {
    if b.is_null() {
        set_error("null braid handle".into());
        return Err(PfStatus::NullPointer);
    }
    Ok(&(*b).0)
}

fn non_null<T>(p: *mut T) -> Result<(), PfStatus> {
    if p.is_null() {
        set_error("null output pointer".into());
        Err(PfStatus::NullPointer)
    } else {
        Ok(())
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

unsafe fn store_braid(out: *mut *mut PfBraid, b: ParamBraid) {
    *out = Box::into_raw(Box::new(PfBraid(b)));
}

/// Copy of the last error message on this thread, or NULL if the last call
/// succeeded. Free with `pf_string_free`.
#[no_mangle]
pub extern "C" fn pf_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |m| m.clone().into_raw()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `b` must be NULL or a handle returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pf_braid_free(b: *mut PfBraid) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Built-in braid by name: `hopf`, `trefoil_neg`, `figure8`, `sigma1_2strand`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_braid_library(name: *const c_char, out: *mut *mut PfBraid) -> PfStatus {
    guard(|| {
        non_null(out)?;
        let b = library(read_str(name)?).map_err(fail)?;
        store_braid(out, b);
        Ok(())
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_braid_from_json(json: *const c_char, out: *mut *mut PfBraid) -> PfStatus {
    guard(|| {
        non_null(out)?;
        let b = ParamBraid::from_json(read_str(json)?).map_err(fail)?;
        store_braid(out, b);
        Ok(())
    })
}

/// # Safety
/// `b` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_braid_to_json(b: *const PfBraid, out: *mut *mut c_char) -> PfStatus {
    guard(|| {
        non_null(out)?;
        *out = to_c_string(braid_ref(b)?.to_json());
        Ok(())
    })
}

/// Total strand count, or 0 for a NULL handle.
///
/// # Safety
/// `b` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pf_braid_strands(b: *const PfBraid) -> usize {
    if b.is_null() {
        0
    } else {
        (*b).0.strands()
    }
}

/// The braid followed by `k` full twists.
///
/// # Safety
/// `b` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_braid_twist(b: *const PfBraid, k: i64, out: *mut *mut PfBraid) -> PfStatus {
    guard(|| {
        non_null(out)?;
        let t = braid_ref(b)?.twist(k);
        store_braid(out, t);
        Ok(())
    })
}

/// The `r`-th power of the braid.
///
/// # Safety
/// `b` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_braid_power(b: *const PfBraid, r: i64, out: *mut *mut PfBraid) -> PfStatus {
    guard(|| {
        non_null(out)?;
        let p = braid_ref(b)?.power(r).map_err(fail)?;
        store_braid(out, p);
        Ok(())
    })
}

/// Satellite of `pattern` with one companion and one power per pattern component.
///
/// # Safety
/// `companions` and `powers` must each point to `count` readable elements, and
/// every companion must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pf_braid_satellite(
    pattern: *const PfBraid,
    companions: *const *const PfBraid,
    powers: *const i64,
    count: usize,
    eps: f64,
    out: *mut *mut PfBraid,
) -> PfStatus {
    guard(|| {
        non_null(out)?;
        let pattern = braid_ref(pattern)?;
        if count > 0 && (companions.is_null() || powers.is_null()) {
            set_error("null companion or power array".into());
            return Err(PfStatus::NullPointer);
        }
        let (cs, rs) = if count == 0 {
            (Vec::new(), Vec::new())
        } else {
            let cs = std::slice::from_raw_parts(companions, count)
                .iter()
                .map(|&c| braid_ref(c).cloned())
                .collect::<Result<Vec<_>, _>>()?;
            (cs, std::slice::from_raw_parts(powers, count).to_vec())
        };
        let s = satellite(pattern, &cs, eps, &rs).map_err(fail)?;
        store_braid(out, s);
        Ok(())
    })
}

/// Fibration check. `passed` receives the verdict. When `report` is not NULL
/// it receives the JSON report, to be freed with `pf_string_free`.
///
/// # Safety
/// `b` must be a live handle, `passed` writable, `report` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn pf_check(
    b: *const PfBraid,
    grid: usize,
    margin: f64,
    passed: *mut bool,
    report: *mut *mut c_char,
) -> PfStatus {
    guard(|| {
        non_null(passed)?;
        let r = check(braid_ref(b)?, &CheckOptions { grid, margin }).map_err(fail)?;
        *passed = r.passed();
        if !report.is_null() {
            *report = to_c_string(r.to_json());
        }
        Ok(())
    })
}

/// Braid word read off the parametrization, as signed generator indices
/// separated by spaces.
///
/// # Safety
/// `b` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_extract_word(b: *const PfBraid, grid: usize, out: *mut *mut c_char) -> PfStatus {
    guard(|| {
        non_null(out)?;
        let opts = ExtractOptions { grid, ..ExtractOptions::default() };
        let w = extract_word(braid_ref(b)?, &opts).map_err(fail)?;
        *out = to_c_string(w.to_string());
        Ok(())
    })
}

/// Alternating homogeneous word on `2 * strands` strands.
///
/// # Safety
/// `word` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_homogenize(word: *const c_char, strands: usize, out: *mut *mut c_char) -> PfStatus {
    guard(|| {
        non_null(out)?;
        let w = BraidWord::parse(read_str(word)?, strands).map_err(fail)?;
        *out = to_c_string(homogenize(&w).to_string());
        Ok(())
    })
}

/// Full twist counts in each direction that make the closure fibered.
///
/// # Safety
/// `word` must be a NUL-terminated string; `positive` and `negative` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_twist_bound(
    word: *const c_char,
    strands: usize,
    positive: *mut u64,
    negative: *mut u64,
) -> PfStatus {
    guard(|| {
        non_null(positive)?;
        non_null(negative)?;
        let w = BraidWord::parse(read_str(word)?, strands).map_err(fail)?;
        let (k1, k2) = twist_bound(&w);
        *positive = k1;
        *negative = k2;
        Ok(())
    })
}
