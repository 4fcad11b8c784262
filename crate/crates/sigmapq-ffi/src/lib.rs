//! C ABI for the sigmapq solver.
//!
//! All entry points are panic-safe: a Rust panic is caught at the boundary
//! and surfaced as `SIGMAPQ_STATUS_INTERNAL_ERROR`. Results are returned as
//! heap-allocated JSON strings the caller must release with
//! [`sigmapq_string_free`].

use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum SigmapqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    VerificationFailed = 3,
    Unresolved = 4,
    InternalError = 5,
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sigmapq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Release a string returned by this library. NULL is accepted.
///
/// # Safety
///
/// `s` must be NULL or a pointer previously returned by this library and
/// not yet freed; passing anything else is undefined behaviour.
#[no_mangle]
pub unsafe extern "C" fn sigmapq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn to_out(json: String, out: *mut *mut c_char) -> SigmapqStatus {
    match CString::new(json) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            SigmapqStatus::Ok
        }
        Err(_) => SigmapqStatus::InternalError,
    }
}

fn guarded(out: *mut *mut c_char, f: impl FnOnce() -> Result<String, SigmapqStatus>) -> SigmapqStatus {
    if out.is_null() {
        return SigmapqStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(json)) => to_out(json, out),
        Ok(Err(status)) => status,
        Err(_) => SigmapqStatus::InternalError,
    }
}

/// Placeholder until the pipeline lands; proves the FFI toolchain.
///
/// # Safety
///
/// `out` must be NULL or a valid pointer to writable `*mut c_char` storage.
#[no_mangle]
pub unsafe extern "C" fn sigmapq_ping_json(out: *mut *mut c_char) -> SigmapqStatus {
    guarded(out, || Ok("{\"ok\":true}".to_string()))
}
