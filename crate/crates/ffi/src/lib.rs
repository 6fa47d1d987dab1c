//! C interface to bplab.
//!
//! Bodies live behind the opaque `BpBody` handle. Every function returns a
//! `BpStatus`; on failure the message is available from
//! `bp_last_error_message` on the same thread. Strings handed out by the
//! library must be released with `bp_string_free`, handles with
//! `bp_body_free`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use bplab::blockgeom::{BlockVector, BodySpec, Gauge};
use bplab::fourier::FtEvaluator;
use bplab::harness::{run_suite, ExperimentConfig};
use bplab::integrate::{body_volume_polar, section_volume, QuadratureParams};
use bplab::Error;

/// Result codes of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    InvalidBody = 4,
    Unsupported = 5,
    Numerical = 6,
    Config = 7,
    Io = 8,
    Internal = 9,
}

/// Opaque body handle.
pub struct BpBody {
    spec: BodySpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BpStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::InvalidParameter(_) | Error::NearEvenInteger(_) => BpStatus::InvalidArgument,
        Error::InvalidBody(_) | Error::DegenerateGauge { .. } | Error::StarPropertyViolated { .. } => BpStatus::InvalidBody,
        Error::UnsupportedKappa(_) | Error::UnsupportedCase { .. } | Error::ConstancyUnverified(_) => BpStatus::Unsupported,
        Error::Config { .. } | Error::Json(_) => BpStatus::Config,
        Error::Io(_) | Error::Csv(_) => BpStatus::Io,
        _ => BpStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (BpStatus, String)>) -> BpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BpStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            BpStatus::Internal
        }
    }
}

fn lib<T>(r: bplab::Result<T>) -> Result<T, (BpStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null<T>(p: *const T, what: &str) -> Result<(), (BpStatus, String)> {
    if p.is_null() {
        Err((BpStatus::NullPointer, format!("{what} is NULL")))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (BpStatus, String)> {
    null(p, what)?;
    CStr::from_ptr(p).to_str().map_err(|e| (BpStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn read_slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], (BpStatus, String)> {
    null(p, what)?;
    Ok(std::slice::from_raw_parts(p, len))
}

fn give_string(s: String, out: *mut *mut c_char) -> Result<(), (BpStatus, String)> {
    let c = CString::new(s).map_err(|e| (BpStatus::Internal, e.to_string()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a body from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bp_body_from_json(json: *const c_char, out: *mut *mut BpBody) -> BpStatus {
    guard(|| {
        null(out, "out")?;
        let text = read_str(json, "json")?;
        let spec = lib(BodySpec::from_json(text))?;
        *out = Box::into_raw(Box::new(BpBody { spec }));
        Ok(())
    })
}

/// Releases a handle; NULL is ignored.
///
/// # Safety
/// `body` must come from `bp_body_from_json` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bp_body_free(body: *mut BpBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// Serializes the body back to JSON; free the result with `bp_string_free`.
///
/// # Safety
/// `body` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bp_body_to_json(body: *const BpBody, out: *mut *mut c_char) -> BpStatus {
    guard(|| {
        null(body, "body")?;
        null(out, "out")?;
        give_string(lib(serde_json::to_string(&(*body).spec).map_err(Error::from))?, out)
    })
}

/// Ambient dimension kappa * n of the body.
///
/// # Safety
/// `body` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bp_body_dim(body: *const BpBody, out: *mut usize) -> BpStatus {
    guard(|| {
        null(body, "body")?;
        null(out, "out")?;
        *out = (*body).spec.layout().dim();
        Ok(())
    })
}

/// Gauge of the body at `x[0..len]`.
///
/// # Safety
/// `x` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bp_body_gauge(body: *const BpBody, x: *const f64, len: usize, out: *mut f64) -> BpStatus {
    guard(|| {
        null(body, "body")?;
        null(out, "out")?;
        let spec = &(*body).spec;
        let v = lib(BlockVector::from_layout(read_slice(x, len, "x")?.to_vec(), spec.layout()))?;
        *out = lib(spec.gauge(&v))?;
        Ok(())
    })
}

/// Volume by the polar formula with `samples` seeded directions.
///
/// # Safety
/// `value` and `std_error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bp_body_volume(
    body: *const BpBody,
    samples: usize,
    seed: u64,
    value: *mut f64,
    std_error: *mut f64,
) -> BpStatus {
    guard(|| {
        null(body, "body")?;
        null(value, "value")?;
        null(std_error, "std_error")?;
        let e = lib(body_volume_polar(&(*body).spec, &QuadratureParams::with_samples(samples), seed))?;
        *value = e.value;
        *std_error = e.std_error;
        Ok(())
    })
}

/// Volume of the central section by H_xi, the complement of the rotation
/// orbit of `xi[0..len]`.
///
/// # Safety
/// `xi` must point to `len` doubles; `value` and `std_error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bp_section_volume(
    body: *const BpBody,
    xi: *const f64,
    len: usize,
    samples: usize,
    seed: u64,
    value: *mut f64,
    std_error: *mut f64,
) -> BpStatus {
    guard(|| {
        null(body, "body")?;
        null(value, "value")?;
        null(std_error, "std_error")?;
        let spec = &(*body).spec;
        let v = lib(BlockVector::from_layout(read_slice(xi, len, "xi")?.to_vec(), spec.layout()).and_then(|v| v.normalized()))?;
        let family = lib(bplab::blockgeom::hurwitz_radon_family(spec.kappa))?;
        let frame = lib(bplab::blockgeom::section_frame(&v, &family))?;
        let e = lib(section_volume(spec, &frame, &QuadratureParams::with_samples(samples), seed))?;
        *value = e.value;
        *std_error = e.std_error;
        Ok(())
    })
}

/// Fourier transform of |x|_D^{-p} at the unit direction `xi`, by the route
/// the layout supports for p.
///
/// # Safety
/// `xi` must point to `len` doubles; `value` and `std_error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bp_fourier_value(
    body: *const BpBody,
    xi: *const f64,
    len: usize,
    exponent: f64,
    samples: usize,
    seed: u64,
    value: *mut f64,
    std_error: *mut f64,
) -> BpStatus {
    guard(|| {
        null(body, "body")?;
        null(value, "value")?;
        null(std_error, "std_error")?;
        let spec = &(*body).spec;
        let v = lib(BlockVector::from_layout(read_slice(xi, len, "xi")?.to_vec(), spec.layout()).and_then(|v| v.normalized()))?;
        let params = QuadratureParams::with_samples(samples);
        let ft = lib(FtEvaluator::new(spec, &params, seed).and_then(|e| e.evaluate(&v, exponent, seed)))?;
        *value = ft.value.value;
        *std_error = ft.value.std_error;
        Ok(())
    })
}

/// Runs an experiment config (JSON text) and returns the suite report as
/// JSON. Body files resolve against the current directory; nothing is
/// written to disk. `exit_code` receives 0 (pass), 2 (fail) or 3
/// (inconclusive).
///
/// # Safety
/// `config_json` must be NUL-terminated; `report_json` and `exit_code` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn bp_run_config(config_json: *const c_char, report_json: *mut *mut c_char, exit_code: *mut i32) -> BpStatus {
    guard(|| {
        null(report_json, "report_json")?;
        null(exit_code, "exit_code")?;
        let config = lib(ExperimentConfig::from_json(read_str(config_json, "config_json")?, "<ffi>"))?;
        let report = lib(run_suite(&config, Path::new(".")))?;
        *exit_code = report.status.exit_code();
        give_string(lib(serde_json::to_string_pretty(&report).map_err(Error::from))?, report_json)
    })
}

/// Releases a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
