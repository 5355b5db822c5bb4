//! C ABI over the `nonlocal` crate.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json` or a
//! fixture constructor and released by the matching `*_free`. Every fallible
//! call returns an `NlStatus`; on failure `nl_last_error` describes the cause
//! on the calling thread. Strings returned through `char **` outputs are owned
//! by the caller and must be released with `nl_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nonlocal::approx::{approximate, TwoQubitRealization};
use nonlocal::boxes::{isotropic_box, pr_box, CorrelationBox};
use nonlocal::bounds::{classical_bound, lhv_membership, see_saw_lower_bound, BellFunctional, SeeSawOptions};
use nonlocal::cube::CubeElement;
use nonlocal::npa::{npa_bound, npa_feasible};
use nonlocal::steering::{assemblage_bound, lhs_bound, lhs_membership, Assemblage, SteeringFunctional};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    SolverFailure = 3,
    Panic = 4,
}

/// Opaque correlation box.
pub struct NlBox {
    inner: CorrelationBox,
}

/// Opaque Bell functional.
pub struct NlFunctional {
    inner: BellFunctional,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure {
    status: NlStatus,
    message: String,
}

impl From<nonlocal::Error> for Failure {
    fn from(e: nonlocal::Error) -> Self {
        let status = if e.is_solver_failure() { NlStatus::SolverFailure } else { NlStatus::InvalidInput };
        Failure { status, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { status: NlStatus::InvalidInput, message: e.to_string() }
    }
}

fn null(what: &str) -> Failure {
    Failure { status: NlStatus::NullPointer, message: format!("{what} is null") }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NlStatus::Ok
        }
        Ok(Err(failure)) => {
            set_error(&failure.message);
            failure.status
        }
        Err(_) => {
            set_error("internal panic");
            NlStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure { status: NlStatus::InvalidInput, message: format!("{what} is not UTF-8") })
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn to_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure { status: NlStatus::InvalidInput, message: "output contains a NUL byte".into() })
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn nl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn nl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `{"m","n","p"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_box_from_json(json: *const c_char, out: *mut *mut NlBox) -> NlStatus {
    guard(|| {
        let inner: CorrelationBox = serde_json::from_str(read_str(json, "json")?)?;
        write(out, Box::into_raw(Box::new(NlBox { inner })), "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_box_pr(out: *mut *mut NlBox) -> NlStatus {
    guard(|| write(out, Box::into_raw(Box::new(NlBox { inner: pr_box() })), "out"))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_box_isotropic(v: f64, out: *mut *mut NlBox) -> NlStatus {
    guard(|| write(out, Box::into_raw(Box::new(NlBox { inner: isotropic_box(v)? })), "out"))
}

/// # Safety
/// `b` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_box_to_json(b: *const NlBox, out: *mut *mut c_char) -> NlStatus {
    guard(|| {
        let s = serde_json::to_string(&borrow(b, "box")?.inner)?;
        write(out, to_c_string(s)?, "out")
    })
}

/// # Safety
/// `b` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nl_box_free(b: *mut NlBox) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Parses `{"m","n","t"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_functional_from_json(json: *const c_char, out: *mut *mut NlFunctional) -> NlStatus {
    guard(|| {
        let inner: BellFunctional = serde_json::from_str(read_str(json, "json")?)?;
        write(out, Box::into_raw(Box::new(NlFunctional { inner })), "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_functional_chsh(out: *mut *mut NlFunctional) -> NlStatus {
    guard(|| write(out, Box::into_raw(Box::new(NlFunctional { inner: BellFunctional::chsh() })), "out"))
}

/// # Safety
/// `f` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nl_functional_free(f: *mut NlFunctional) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_classical_bound(f: *const NlFunctional, value: *mut f64) -> NlStatus {
    guard(|| write(value, classical_bound(&borrow(f, "functional")?.inner)?.value, "value"))
}

/// Certified upper bound over boxes with a level-`level` NPA certificate.
///
/// # Safety
/// `f` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_npa_bound(f: *const NlFunctional, level: usize, value: *mut f64) -> NlStatus {
    guard(|| write(value, npa_bound(&borrow(f, "functional")?.inner, level)?.value, "value"))
}

/// Quantum lower bound from see-saw optimization in local dimensions
/// `d_a × d_b`.
///
/// # Safety
/// `f` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_see_saw(
    f: *const NlFunctional,
    d_a: usize,
    d_b: usize,
    restarts: usize,
    seed: u64,
    value: *mut f64,
) -> NlStatus {
    guard(|| {
        let opts = SeeSawOptions { d_a, d_b, restarts, seed };
        write(value, see_saw_lower_bound(&borrow(f, "functional")?.inner, opts)?.value, "value")
    })
}

/// # Safety
/// `f`, `b` must be live handles; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_evaluate(f: *const NlFunctional, b: *const NlBox, value: *mut f64) -> NlStatus {
    guard(|| write(value, borrow(f, "functional")?.inner.evaluate(&borrow(b, "box")?.inner)?, "value"))
}

/// # Safety
/// `b` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_nonsignalling(b: *const NlBox, tol: f64, ok: *mut bool, violation: *mut f64) -> NlStatus {
    guard(|| {
        let check = borrow(b, "box")?.inner.is_nonsignalling(tol);
        write(ok, check.ok, "ok")?;
        write(violation, check.max_violation, "violation")
    })
}

/// # Safety
/// `b` must be a live handle; `member` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_lhv_member(b: *const NlBox, member: *mut bool) -> NlStatus {
    guard(|| write(member, lhv_membership(&borrow(b, "box")?.inner)?.member, "member"))
}

/// # Safety
/// `b` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_npa_feasible(
    b: *const NlBox,
    level: usize,
    tol: f64,
    feasible: *mut bool,
    margin: *mut f64,
) -> NlStatus {
    guard(|| {
        let r = npa_feasible(&borrow(b, "box")?.inner, level, tol)?;
        write(feasible, r.feasible, "feasible")?;
        write(margin, r.margin, "margin")
    })
}

/// Positivity of a cube element given as `{"m","n","re","im"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `positive` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_cube_is_positive(json: *const c_char, positive: *mut bool) -> NlStatus {
    guard(|| {
        let t: CubeElement = serde_json::from_str(read_str(json, "json")?)?;
        write(positive, t.is_positive(), "positive")
    })
}

/// LHS bound and quantum bound of a steering functional `{"m","n","d","F"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_steering_bounds(json: *const c_char, lhs: *mut f64, quantum: *mut f64) -> NlStatus {
    guard(|| {
        let f: SteeringFunctional = serde_json::from_str(read_str(json, "json")?)?;
        write(lhs, lhs_bound(&f)?, "lhs")?;
        write(quantum, assemblage_bound(&f)?, "quantum")
    })
}

/// LHS membership of an assemblage `{"m","n","d","sigma"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `member` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_lhs_member(json: *const c_char, tol: f64, member: *mut bool) -> NlStatus {
    guard(|| {
        let s: Assemblage = serde_json::from_str(read_str(json, "json")?)?;
        write(member, lhs_membership(&s, tol)?.member, "member")
    })
}

/// Approximates a canonical two-qubit realization `{"psi","alpha","beta"}`
/// and writes `{"N","k0","l0","distance","box",…}` as JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_approximate(json: *const c_char, eps: f64, result: *mut *mut c_char) -> NlStatus {
    guard(|| {
        if result.is_null() {
            return Err(null("result"));
        }
        let r: TwoQubitRealization = serde_json::from_str(read_str(json, "json")?)?;
        let s = serde_json::to_string(&approximate(&r, eps)?)?;
        write(result, to_c_string(s)?, "result")
    })
}
