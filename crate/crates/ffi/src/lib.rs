//! C ABI for the superwave toolkit.
//!
//! Conventions: opaque handles created by `*_parse_json`/`*_builtin` and
//! released by the matching `*_free`; integer status codes mirroring the CLI
//! exit codes (0 ok, 1 check failed, 2 invalid input, 3 mode unsupported);
//! strings returned as malloc'd UTF-8 released with `swv_string_free`. The
//! last error message is kept per thread and read with `swv_last_error`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use superwave::builtins::builtin_system;
use superwave::characterization::{
    check_strong_disjointness, check_super_wavelet, offset_set_check, oversample, CheckOptions,
    CheckReport, WaveletSystem,
};
use superwave::docs::{parse_document, report_to_json, serialize_document, Document};
use superwave::error::Error;
use superwave::spectrum::StepSpectrum;

/// Status codes shared with the command line exit codes.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum SwvStatus {
    Ok = 0,
    CheckFailed = 1,
    InvalidInput = 2,
    ModeUnsupported = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Evaluation mode for checks.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum SwvMode {
    Exact = 0,
    Grid = 1,
}

/// Opaque wavelet system handle.
pub struct SwvSystem {
    inner: WaveletSystem,
}

/// Opaque check report handle.
pub struct SwvReport {
    inner: CheckReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).ok();
    });
}

fn status_of(err: &Error) -> SwvStatus {
    match err.exit_code() {
        3 => SwvStatus::ModeUnsupported,
        _ => SwvStatus::InvalidInput,
    }
}

fn guard(body: impl FnOnce() -> SwvStatus) -> SwvStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            SwvStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, SwvStatus> {
    if text.is_null() {
        set_error("null string argument");
        return Err(SwvStatus::NullPointer);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        SwvStatus::InvalidInput
    })
}

fn options_for(mode: SwvMode) -> CheckOptions {
    match mode {
        SwvMode::Exact => CheckOptions::exact(),
        SwvMode::Grid => CheckOptions::grid(),
    }
}

fn emit_system(system: WaveletSystem, out: *mut *mut SwvSystem) -> SwvStatus {
    if out.is_null() {
        set_error("null output pointer");
        return SwvStatus::NullPointer;
    }
    unsafe {
        *out = Box::into_raw(Box::new(SwvSystem { inner: system }));
    }
    SwvStatus::Ok
}

fn emit_report(report: CheckReport, out: *mut *mut SwvReport) -> SwvStatus {
    let failed = !report.passed;
    if !out.is_null() {
        unsafe {
            *out = Box::into_raw(Box::new(SwvReport { inner: report }));
        }
    }
    if failed {
        SwvStatus::CheckFailed
    } else {
        SwvStatus::Ok
    }
}

fn to_c_string(text: String) -> *mut c_char {
    CString::new(text)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Most recent error message on this thread, or NULL. Free with
/// `swv_string_free`.
#[no_mangle]
pub extern "C" fn swv_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(message) => to_c_string(message.to_string_lossy().into_owned()),
        None => ptr::null_mut(),
    })
}

/// Frees a string returned by this library.
#[no_mangle]
pub extern "C" fn swv_string_free(text: *mut c_char) {
    if !text.is_null() {
        unsafe {
            drop(CString::from_raw(text));
        }
    }
}

/// Parses a system document (JSON) into a handle.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swv_system_parse_json(
    json: *const c_char,
    out: *mut *mut SwvSystem,
) -> SwvStatus {
    guard(|| {
        let text = match read_str(json) {
            Ok(text) => text,
            Err(status) => return status,
        };
        match parse_document(text) {
            Ok((Document::System(system), _)) => emit_system(system, out),
            Ok(_) => {
                set_error("expected a system document");
                SwvStatus::InvalidInput
            }
            Err(err) => {
                set_error(err.to_string());
                status_of(&err)
            }
        }
    })
}

/// Builds a named builtin system (see the CLI `--builtin` names).
///
/// # Safety
/// `name` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swv_system_builtin(
    name: *const c_char,
    out: *mut *mut SwvSystem,
) -> SwvStatus {
    guard(|| {
        let name = match read_str(name) {
            Ok(name) => name,
            Err(status) => return status,
        };
        match builtin_system(name) {
            Ok(system) => emit_system(system, out),
            Err(err) => {
                set_error(err.to_string());
                status_of(&err)
            }
        }
    })
}

/// Serializes the system document. Free with `swv_string_free`.
///
/// # Safety
/// `system` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn swv_system_to_json(system: *const SwvSystem) -> *mut c_char {
    if system.is_null() {
        set_error("null system handle");
        return ptr::null_mut();
    }
    let system = &(*system).inner;
    match serialize_document(&Document::System(system.clone())) {
        Ok(text) => to_c_string(text),
        Err(err) => {
            set_error(err.to_string());
            ptr::null_mut()
        }
    }
}

/// Releases a system handle.
///
/// # Safety
/// `system` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn swv_system_free(system: *mut SwvSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Validates the structure of a system: `Ok` when all invariants hold,
/// `CheckFailed` otherwise (details in `swv_last_error`).
///
/// # Safety
/// `system` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn swv_validate_structure(system: *const SwvSystem) -> SwvStatus {
    guard(|| {
        if system.is_null() {
            set_error("null system handle");
            return SwvStatus::NullPointer;
        }
        let violations = (*system).inner.structure.validate();
        if violations.is_empty() {
            SwvStatus::Ok
        } else {
            set_error(
                violations
                    .iter()
                    .map(|v| v.description.clone())
                    .collect::<Vec<_>>()
                    .join("; "),
            );
            SwvStatus::CheckFailed
        }
    })
}

/// Runs the super-wavelet characterization check. On success or check
/// failure, `out_report` (when non-NULL) receives a report handle.
///
/// # Safety
/// `system` must be a live handle; `out_report` NULL or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swv_check_wavelet(
    system: *const SwvSystem,
    mode: SwvMode,
    out_report: *mut *mut SwvReport,
) -> SwvStatus {
    guard(|| {
        if system.is_null() {
            set_error("null system handle");
            return SwvStatus::NullPointer;
        }
        match check_super_wavelet(&(*system).inner, &options_for(mode)) {
            Ok(report) => emit_report(report, out_report),
            Err(err) => {
                set_error(err.to_string());
                status_of(&err)
            }
        }
    })
}

fn scalar_components(system: &WaveletSystem) -> Result<Vec<StepSpectrum>, Error> {
    if system.structure.n() != 1 {
        return Err(Error::schema(
            "system",
            "strong disjointness takes scalar (n = 1) systems",
        ));
    }
    Ok(system
        .psis
        .iter()
        .map(|p| p.components[0].clone())
        .collect())
}

/// Strong disjointness of two scalar systems over the same scale.
///
/// # Safety
/// `first` and `second` must be live handles; `out_report` NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn swv_check_disjoint(
    first: *const SwvSystem,
    second: *const SwvSystem,
    mode: SwvMode,
    out_report: *mut *mut SwvReport,
) -> SwvStatus {
    guard(|| {
        if first.is_null() || second.is_null() {
            set_error("null system handle");
            return SwvStatus::NullPointer;
        }
        let a = &(*first).inner;
        let b = &(*second).inner;
        if a.structure.scale() != b.structure.scale() {
            set_error("systems have different scales");
            return SwvStatus::InvalidInput;
        }
        let result = scalar_components(a).and_then(|psis| {
            scalar_components(b).and_then(|others| {
                check_strong_disjointness(
                    &psis,
                    &others,
                    a.structure.scale(),
                    &options_for(mode),
                )
            })
        });
        match result {
            Ok(report) => emit_report(report, out_report),
            Err(err) => {
                set_error(err.to_string());
                status_of(&err)
            }
        }
    })
}

/// Builds the p-fold oversampled super-wavelet system from a scalar system.
///
/// # Safety
/// `system` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swv_oversample(
    system: *const SwvSystem,
    p: u32,
    out: *mut *mut SwvSystem,
) -> SwvStatus {
    guard(|| {
        if system.is_null() {
            set_error("null system handle");
            return SwvStatus::NullPointer;
        }
        let input = &(*system).inner;
        let labels: Vec<String> = input.psis.iter().map(|f| f.label.clone()).collect();
        let result = scalar_components(input).and_then(|psis| {
            oversample(&psis, input.structure.scale(), p, Some(&labels))
        });
        match result {
            Ok(oversampled) => emit_system(oversampled, out),
            Err(err) => {
                set_error(err.to_string());
                status_of(&err)
            }
        }
    })
}

/// The oversampling offset-set identity for `|q| <= q_bound`.
#[no_mangle]
pub extern "C" fn swv_offset_set_check(scale: u32, p: u32, q_bound: i64) -> SwvStatus {
    guard(|| match offset_set_check(scale, p, q_bound) {
        Ok(report) if report.passed => SwvStatus::Ok,
        Ok(_) => SwvStatus::CheckFailed,
        Err(err) => {
            set_error(err.to_string());
            status_of(&err)
        }
    })
}

/// Whether the checked equations held.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn swv_report_passed(report: *const SwvReport) -> bool {
    !report.is_null() && (*report).inner.passed
}

/// Largest residual over all evaluations.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn swv_report_max_residual(report: *const SwvReport) -> f64 {
    if report.is_null() {
        return f64::NAN;
    }
    (*report).inner.max_residual
}

/// Number of evaluated cells (or grid points).
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn swv_report_cells_checked(report: *const SwvReport) -> u64 {
    if report.is_null() {
        return 0;
    }
    (*report).inner.cells_checked as u64
}

/// JSON form of the report (`passed`, `mode`, `max_residual`, `witness`,
/// `cells_checked`). Free with `swv_string_free`.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn swv_report_to_json(report: *const SwvReport) -> *mut c_char {
    if report.is_null() {
        set_error("null report handle");
        return ptr::null_mut();
    }
    to_c_string(report_to_json(&(*report).inner).to_string())
}

/// Releases a report handle.
///
/// # Safety
/// `report` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn swv_report_free(report: *mut SwvReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
