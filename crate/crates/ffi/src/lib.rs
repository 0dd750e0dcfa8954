//! C ABI for the scenario runner: opaque handles, integer status codes and
//! a thread-local last-error message. The matching declarations live in
//! `include/scalerel.h`.
//!
//! Ownership rules: every `*_new`/`*_parse`/`srl_run` output must be
//! released with the matching `*_free`; strings returned through `char**`
//! are released with `srl_string_free`. Handles are not thread-safe; the
//! last-error buffer is per thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::path::Path;

use scalerel::scenario::{emit_plots, run, ScenarioConfig, RunManifest};
use scalerel::Error;

pub const SRL_OK: c_int = 0;
/// Numerical or mid-run failure.
pub const SRL_ERR_RUN: c_int = 1;
/// Invalid configuration.
pub const SRL_ERR_CONFIG: c_int = 2;
/// Null pointer argument.
pub const SRL_ERR_NULL: c_int = 3;
/// Argument was not valid UTF-8.
pub const SRL_ERR_UTF8: c_int = 4;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(cleaned).unwrap_or_default());
}

fn status_of(err: &Error) -> c_int {
    err.exit_code() as c_int
}

/// Opaque scenario configuration handle.
pub struct SrlConfig(ScenarioConfig);
/// Opaque run-manifest handle.
pub struct SrlManifest(RunManifest);

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, c_int> {
    if ptr.is_null() {
        set_error("null pointer argument");
        return Err(SRL_ERR_NULL);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        SRL_ERR_UTF8
    })
}

/// Message of the last error raised on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn srl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn srl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses a flat key=value configuration text into a new handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn srl_config_parse(
    text: *const c_char,
    out: *mut *mut SrlConfig,
) -> c_int {
    if out.is_null() {
        set_error("null output pointer");
        return SRL_ERR_NULL;
    }
    let text = match cstr(text) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match ScenarioConfig::parse_str(text) {
        Ok(cfg) => {
            *out = Box::into_raw(Box::new(SrlConfig(cfg)));
            SRL_OK
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Applies one key=value override to an existing configuration.
///
/// # Safety
/// `cfg` must come from `srl_config_parse`; `key`/`value` must be valid
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn srl_config_set(
    cfg: *mut SrlConfig,
    key: *const c_char,
    value: *const c_char,
) -> c_int {
    if cfg.is_null() {
        set_error("null configuration handle");
        return SRL_ERR_NULL;
    }
    let (key, value) = match (cstr(key), cstr(value)) {
        (Ok(k), Ok(v)) => (k, v),
        (Err(c), _) | (_, Err(c)) => return c,
    };
    match (*cfg).0.apply(key, value).and_then(|_| (*cfg).0.validate()) {
        Ok(()) => SRL_OK,
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Releases a configuration handle. Null is a no-op.
///
/// # Safety
/// `cfg` must come from `srl_config_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn srl_config_free(cfg: *mut SrlConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs the configured scenario; on success the manifest handle is stored
/// in `out`. A run that completes but fails its criteria still returns
/// SRL_OK; query `srl_manifest_pass`.
///
/// # Safety
/// `cfg` must come from `srl_config_parse` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn srl_run(cfg: *const SrlConfig, out: *mut *mut SrlManifest) -> c_int {
    if cfg.is_null() || out.is_null() {
        set_error("null pointer argument");
        return SRL_ERR_NULL;
    }
    match run(&(*cfg).0) {
        Ok(manifest) => {
            *out = Box::into_raw(Box::new(SrlManifest(manifest)));
            SRL_OK
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// 1 if every scenario criterion passed, else 0.
///
/// # Safety
/// `m` must come from `srl_run`.
#[no_mangle]
pub unsafe extern "C" fn srl_manifest_pass(m: *const SrlManifest) -> c_int {
    if m.is_null() {
        return 0;
    }
    (*m).0.pass as c_int
}

/// 1 if the run stopped before completion, else 0.
///
/// # Safety
/// `m` must come from `srl_run`.
#[no_mangle]
pub unsafe extern "C" fn srl_manifest_incomplete(m: *const SrlManifest) -> c_int {
    if m.is_null() {
        return 0;
    }
    (*m).0.incomplete as c_int
}

/// Serializes the manifest to JSON; release the string with
/// `srl_string_free`.
///
/// # Safety
/// `m` must come from `srl_run` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn srl_manifest_json(
    m: *const SrlManifest,
    out: *mut *mut c_char,
) -> c_int {
    if m.is_null() || out.is_null() {
        set_error("null pointer argument");
        return SRL_ERR_NULL;
    }
    match serde_json_string(&(*m).0) {
        Ok(s) => {
            *out = s.into_raw();
            SRL_OK
        }
        Err(code) => code,
    }
}

fn serde_json_string(m: &RunManifest) -> Result<CString, c_int> {
    let json = match m.to_json() {
        Ok(j) => j,
        Err(e) => {
            set_error(&e.to_string());
            return Err(status_of(&e));
        }
    };
    CString::new(json).map_err(|_| {
        set_error("manifest JSON contained an interior NUL");
        SRL_ERR_RUN
    })
}

/// Releases a manifest handle. Null is a no-op.
///
/// # Safety
/// `m` must come from `srl_run` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn srl_manifest_free(m: *mut SrlManifest) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Releases a string returned through a `char**` output.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn srl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Emits gnuplot scripts for a completed run directory.
///
/// # Safety
/// `dir` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn srl_emit_plots(dir: *const c_char) -> c_int {
    let dir = match cstr(dir) {
        Ok(d) => d,
        Err(code) => return code,
    };
    match emit_plots(Path::new(dir)) {
        Ok(_) => SRL_OK,
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn parse(text: &str) -> *mut SrlConfig {
        let mut out: *mut SrlConfig = ptr::null_mut();
        assert_eq!(srl_config_parse(c(text).as_ptr(), &mut out), SRL_OK);
        out
    }

    #[test]
    fn parse_run_and_manifest_round_trip() {
        unsafe {
            let tmp = tempfile::tempdir().unwrap();
            let cfg = parse("scenario = fractal-scan\nseed = 5\npaths = 20\n");
            let out_key = c("out");
            let out_val = c(tmp.path().to_str().unwrap());
            assert_eq!(srl_config_set(cfg, out_key.as_ptr(), out_val.as_ptr()), SRL_OK);

            let mut m: *mut SrlManifest = ptr::null_mut();
            assert_eq!(srl_run(cfg, &mut m), SRL_OK);
            assert_eq!(srl_manifest_pass(m), 1);
            assert_eq!(srl_manifest_incomplete(m), 0);

            let mut s: *mut c_char = ptr::null_mut();
            assert_eq!(srl_manifest_json(m, &mut s), SRL_OK);
            let json = CStr::from_ptr(s).to_str().unwrap();
            assert!(json.contains("\"scenario\": \"fractal-scan\""));
            srl_string_free(s);

            assert_eq!(srl_emit_plots(out_val.as_ptr()), SRL_OK);
            srl_manifest_free(m);
            srl_config_free(cfg);
        }
    }

    #[test]
    fn config_errors_set_message_and_code() {
        unsafe {
            let mut out: *mut SrlConfig = ptr::null_mut();
            let code = srl_config_parse(c("scenario = sho\n").as_ptr(), &mut out);
            assert_eq!(code, SRL_ERR_CONFIG);
            let msg = CStr::from_ptr(srl_last_error()).to_str().unwrap();
            assert!(msg.contains("seed"), "{msg}");

            let cfg = parse("scenario = sho\nseed = 1\n");
            let code = srl_config_set(cfg, c("bogus").as_ptr(), c("1").as_ptr());
            assert_eq!(code, SRL_ERR_CONFIG);
            srl_config_free(cfg);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut out: *mut SrlConfig = ptr::null_mut();
            assert_eq!(srl_config_parse(ptr::null(), &mut out), SRL_ERR_NULL);
            assert_eq!(srl_run(ptr::null(), ptr::null_mut()), SRL_ERR_NULL);
            assert_eq!(srl_manifest_pass(ptr::null()), 0);
            srl_config_free(ptr::null_mut());
            srl_manifest_free(ptr::null_mut());
            srl_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn version_is_a_static_string() {
        unsafe {
            let v = CStr::from_ptr(srl_version()).to_str().unwrap();
            assert_eq!(v, env!("CARGO_PKG_VERSION"));
        }
    }
}
