//! C ABI over the `omem` engine.
//!
//! A scenario is an opaque handle built from configuration text (the same
//! `key = value` format the CLI reads). Every call returns an [`OmemStatus`];
//! on failure the message is kept per thread and read back with
//! [`omem_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use omem::cli::{Config, Scenario};
use omem::Error;

/// Status codes. The nonzero values 2–4 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmemStatus {
    Ok = 0,
    /// Null pointer or text that is not UTF-8.
    InvalidArgument = 1,
    Config = 2,
    Unstable = 3,
    Numerical = 4,
    Panic = 5,
}

/// Result of one protocol evaluation.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OmemFidelity {
    pub fidelity: f64,
    pub n_h: f64,
    pub lambda: f64,
    /// Rotation angle removed before comparing, radians.
    pub theta: f64,
    /// Pulse length, seconds.
    pub t_s: f64,
    /// Storage time, seconds.
    pub tau: f64,
}

/// Opaque scenario handle.
pub struct OmemScenario {
    config: Config,
    scenario: Scenario,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> OmemStatus {
    match e.exit_code() {
        3 => OmemStatus::Unstable,
        4 => OmemStatus::Numerical,
        _ => OmemStatus::Config,
    }
}

fn fail(e: Error) -> OmemStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn guard(f: impl FnOnce() -> OmemStatus) -> OmemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            OmemStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, OmemStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(OmemStatus::InvalidArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        OmemStatus::InvalidArgument
    })
}

/// Builds a scenario from configuration text, e.g. `"preset = teufel"`.
/// On success `*out` owns a handle to release with [`omem_scenario_free`].
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn omem_scenario_new(
    config: *const c_char,
    out: *mut *mut OmemScenario,
) -> OmemStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return OmemStatus::InvalidArgument;
        }
        *out = ptr::null_mut();
        let text = match text(config, "config") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let built = Config::parse(text, "config")
            .map_err(Error::from)
            .and_then(|c| Ok((c.resolve(None)?, c)));
        match built {
            Ok((scenario, config)) => {
                *out = Box::into_raw(Box::new(OmemScenario { config, scenario }));
                OmemStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Sets one key, e.g. `("GammaL", "1 kHz")`. The handle is unchanged if the
/// new value does not resolve.
///
/// # Safety
/// `handle` must come from [`omem_scenario_new`]; `key` and `value` must be
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn omem_scenario_set(
    handle: *mut OmemScenario,
    key: *const c_char,
    value: *const c_char,
) -> OmemStatus {
    guard(|| {
        let Some(h) = handle.as_mut() else {
            set_error("handle is null");
            return OmemStatus::InvalidArgument;
        };
        let (key, value) = match (text(key, "key"), text(value, "value")) {
            (Ok(k), Ok(v)) => (k, v),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let mut config = h.config.clone();
        let resolved = config
            .set(key, value)
            .and_then(|_| config.resolve(None))
            .map_err(Error::from);
        match resolved {
            Ok(scenario) => {
                h.config = config;
                h.scenario = scenario;
                OmemStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Runs write, store and read and reports the fidelity.
///
/// # Safety
/// `handle` must come from [`omem_scenario_new`] and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn omem_scenario_fidelity(
    handle: *const OmemScenario,
    out: *mut OmemFidelity,
) -> OmemStatus {
    guard(|| {
        let (Some(h), false) = (handle.as_ref(), out.is_null()) else {
            set_error("handle or out is null");
            return OmemStatus::InvalidArgument;
        };
        let sc = &h.scenario;
        match omem::evaluate(&sc.params, &sc.input, &sc.protocol) {
            Ok(o) => {
                *out = OmemFidelity {
                    fidelity: o.fidelity.fidelity,
                    n_h: o.fidelity.n_h,
                    lambda: o.fidelity.lambda,
                    theta: o.fidelity.theta,
                    t_s: o.t_s,
                    tau: o.tau,
                };
                OmemStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Copies the resolved configuration text into `buf`. Returns the length
/// needed including the terminating NUL; nothing is written if `len` is too
/// small. Returns 0 for a null handle.
///
/// # Safety
/// `buf` must point to `len` writable bytes (or be null with `len == 0`).
#[no_mangle]
pub unsafe extern "C" fn omem_scenario_dump(
    handle: *const OmemScenario,
    buf: *mut c_char,
    len: usize,
) -> usize {
    match handle.as_ref() {
        Some(h) => copy_out(&h.scenario.dump(), buf, len),
        None => 0,
    }
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `handle` must come from [`omem_scenario_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn omem_scenario_free(handle: *mut OmemScenario) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Copies this thread's last error message; same length contract as
/// [`omem_scenario_dump`].
///
/// # Safety
/// `buf` must point to `len` writable bytes (or be null with `len == 0`).
#[no_mangle]
pub unsafe extern "C" fn omem_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| copy_out(&e.borrow(), buf, len))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn omem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

unsafe fn copy_out(s: &str, buf: *mut c_char, len: usize) -> usize {
    let need = s.len() + 1;
    if !buf.is_null() && len >= need {
        ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
        *buf.add(s.len()) = 0;
    }
    need
}
