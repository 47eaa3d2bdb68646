//! C ABI over the `ncample` engine.
//!
//! Systems are opaque `NcSystem` handles created from JSON documents and
//! released with `nc_system_free`. Every fallible call returns an
//! `NcStatus`; on failure `nc_last_error` describes the problem for the
//! calling thread. Strings handed out by the library are released with
//! `nc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ncample::ampleness::{nc_ample_verdict, VerdictKind};
use ncample::cli::payload;
use ncample::gk::{gk_from_verdict, GkError};
use ncample::lattice::{is_quasi_unipotent, Matrix};
use ncample::system::{load_system, BimoduleSystem};
use num_traits::ToPrimitive;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The document is malformed or describes an invalid system.
    InvalidInput = 3,
    /// An argument has the wrong length or value.
    InvalidArgument = 4,
    /// A result does not fit the output type.
    Overflow = 5,
    /// The verdict is undetermined within the search bound.
    Undetermined = 6,
    /// The system is decisively not NC-ample.
    NotNcAmple = 7,
    /// Internal error; the library caught a panic.
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcVerdictKind {
    NcAmple = 0,
    QuasiUnipotentFail = 1,
    EventualAmplenessFail = 2,
    Undetermined = 3,
}

/// Opaque bimodule system.
pub struct NcSystem {
    inner: BimoduleSystem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(NcStatus, String);

impl Failure {
    fn new(status: NcStatus, msg: impl Into<String>) -> Self {
        Failure(status, msg.into())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            NcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal error: {msg}"));
            NcStatus::Panic
        }
    }
}

unsafe fn system<'a>(sys: *const NcSystem) -> Result<&'a BimoduleSystem, Failure> {
    sys.as_ref().map(|s| &s.inner).ok_or_else(|| Failure::new(NcStatus::NullPointer, "null system handle"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::new(NcStatus::NullPointer, format!("null {what}")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(NcStatus::NullPointer, format!("null {what}")));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_handle(out: *mut *mut NcSystem, sys: BimoduleSystem) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(NcStatus::NullPointer, "null output handle"));
    }
    out.write(Box::into_raw(Box::new(NcSystem { inner: sys })));
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure::new(NcStatus::InvalidArgument, "string contains NUL"))?;
    write(out, c.into_raw(), "output string")
}

fn bad_arg(msg: impl Into<String>) -> Failure {
    Failure::new(NcStatus::InvalidArgument, msg)
}

/// Message for the last failed call on this thread, or NULL. Owned by the
/// library and valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn nc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a system document (JSON, NUL-terminated UTF-8).
///
/// # Safety
/// `json` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_system_from_json(json: *const c_char, out: *mut *mut NcSystem) -> NcStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::new(NcStatus::NullPointer, "null document"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Failure::new(NcStatus::InvalidUtf8, e.to_string()))?;
        let sys = load_system(text).map_err(|e| Failure::new(NcStatus::InvalidInput, e.to_string()))?;
        write_handle(out, sys)
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `sys` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nc_system_free(sys: *mut NcSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Serializes the system back to a JSON document.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_system_to_json(sys: *const NcSystem, out: *mut *mut c_char) -> NcStatus {
    guard(|| write_string(out, system(sys)?.to_document().to_json()))
}

/// Number of bimodules `s`.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_system_arity(sys: *const NcSystem, out: *mut usize) -> NcStatus {
    guard(|| write(out, system(sys)?.s(), "output"))
}

/// Picard rank `rho`.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_system_rank(sys: *const NcSystem, out: *mut usize) -> NcStatus {
    guard(|| write(out, system(sys)?.rho(), "output"))
}

/// Writes the `rho` coordinates of the class of grade `n` (length `s`) into
/// `out`, which must hold `out_len >= rho` values. Returns `Overflow` when a
/// coordinate does not fit in 64 bits.
///
/// # Safety
/// `n` must point to `n_len` values and `out` to `out_len` writable values.
#[no_mangle]
pub unsafe extern "C" fn nc_class_at(
    sys: *const NcSystem,
    n: *const u64,
    n_len: usize,
    out: *mut i64,
    out_len: usize,
) -> NcStatus {
    guard(|| {
        let sys = system(sys)?;
        let n = slice(n, n_len, "grade")?;
        if n.len() != sys.s() {
            return Err(bad_arg(format!("grade has length {}, expected {}", n.len(), sys.s())));
        }
        if out_len < sys.rho() {
            return Err(bad_arg(format!("output holds {out_len} values, need {}", sys.rho())));
        }
        if out.is_null() {
            return Err(Failure::new(NcStatus::NullPointer, "null output"));
        }
        let class = sys.class_at(n);
        let values: Vec<i64> = class
            .coords()
            .iter()
            .map(|c| c.to_i64().ok_or_else(|| Failure::new(NcStatus::Overflow, format!("coordinate {c} exceeds 64 bits"))))
            .collect::<Result<_, _>>()?;
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
        Ok(())
    })
}

/// NC-ampleness verdict. Writes the kind and, if `json_out` is not NULL, a
/// JSON description with the certificate or witness.
///
/// # Safety
/// `sys` must be a live handle, `kind_out` writable, `json_out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn nc_verdict(
    sys: *const NcSystem,
    bound: u64,
    kind_out: *mut NcVerdictKind,
    json_out: *mut *mut c_char,
) -> NcStatus {
    guard(|| {
        let sys = system(sys)?;
        if bound == 0 {
            return Err(bad_arg("search bound must be positive"));
        }
        let v = nc_ample_verdict(sys, bound);
        let kind = match v.kind {
            VerdictKind::NcAmple { .. } => NcVerdictKind::NcAmple,
            VerdictKind::QuasiUnipotentFail { .. } => NcVerdictKind::QuasiUnipotentFail,
            VerdictKind::EventualAmplenessFail { .. } => NcVerdictKind::EventualAmplenessFail,
            VerdictKind::Undetermined { .. } => NcVerdictKind::Undetermined,
        };
        write(kind_out, kind, "verdict kind")?;
        if !json_out.is_null() {
            write_string(json_out, payload::verdict(&v, sys).to_string())?;
        }
        Ok(())
    })
}

/// GK dimension with its bounds `[lower, upper]`. Fails with `NotNcAmple`
/// or `Undetermined` when no certificate exists.
///
/// # Safety
/// `sys` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn nc_gk(
    sys: *const NcSystem,
    bound: u64,
    gk_out: *mut u32,
    lower_out: *mut u64,
    upper_out: *mut u64,
) -> NcStatus {
    guard(|| {
        let sys = system(sys)?;
        if bound == 0 {
            return Err(bad_arg("search bound must be positive"));
        }
        let v = nc_ample_verdict(sys, bound);
        let c = gk_from_verdict(sys, &v).map_err(|e| {
            let status = match e {
                GkError::Undetermined { .. } => NcStatus::Undetermined,
                GkError::NotNcAmple { .. } => NcStatus::NotNcAmple,
                GkError::DegenerateHilbert => NcStatus::InvalidInput,
            };
            Failure::new(status, e.to_string())
        })?;
        write(gk_out, c.gk, "gk output")?;
        write(lower_out, c.lower, "lower bound output")?;
        write(upper_out, c.upper, "upper bound output")
    })
}

/// Dual system with inverted twists.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_dual(sys: *const NcSystem, out: *mut *mut NcSystem) -> NcStatus {
    guard(|| write_handle(out, system(sys)?.dual()))
}

/// Veronese system for the positive exponents `n` (length `s`).
///
/// # Safety
/// `sys` must be a live handle, `n` must point to `n_len` values, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_veronese(
    sys: *const NcSystem,
    n: *const u64,
    n_len: usize,
    out: *mut *mut NcSystem,
) -> NcStatus {
    guard(|| {
        let v = system(sys)?.veronese(slice(n, n_len, "exponents")?).map_err(|e| bad_arg(e.to_string()))?;
        write_handle(out, v)
    })
}

/// Rees-type system of a single-bimodule system.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_rees(sys: *const NcSystem, out: *mut *mut NcSystem) -> NcStatus {
    guard(|| write_handle(out, system(sys)?.rees().map_err(|e| bad_arg(e.to_string()))?))
}

/// System on the product scheme.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_product(x: *const NcSystem, y: *const NcSystem, out: *mut *mut NcSystem) -> NcStatus {
    guard(|| write_handle(out, BimoduleSystem::product(system(x)?, system(y)?)))
}

/// Quasi-unipotence of the row-major `rho x rho` integer matrix. On success
/// `out` is 1 and `order_out` the least `r` with `(m^r - I)` nilpotent, or
/// `out` is 0 and `order_out` is left untouched.
///
/// # Safety
/// `rows` must point to `rho * rho` values; `out` must be writable and
/// `order_out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn nc_is_quasi_unipotent(
    rows: *const i64,
    rho: usize,
    out: *mut i32,
    order_out: *mut u64,
) -> NcStatus {
    guard(|| {
        let len = rho.checked_mul(rho).ok_or_else(|| bad_arg("rank too large"))?;
        if rho == 0 {
            return Err(bad_arg("rank must be positive"));
        }
        let flat = slice(rows, len, "matrix")?;
        let rows: Vec<&[i64]> = flat.chunks(rho).collect();
        let cert = is_quasi_unipotent(&Matrix::from_i64(&rows)).map_err(|e| bad_arg(e.to_string()))?;
        write(out, i32::from(cert.is_some()), "output")?;
        if let (Some(c), false) = (cert, order_out.is_null()) {
            order_out.write(c.order);
        }
        Ok(())
    })
}
