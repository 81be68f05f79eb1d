//! C ABI for the kptau library.
//!
//! Handles are opaque pointers owned by Rust; every constructor has a
//! matching `_free`, and strings returned by `_json` functions must be
//! released with [`kptau_string_free`].  Fallible calls return NULL (for
//! pointers) or a nonzero [`KptauStatus`]; the message for the most
//! recent failure on the current thread is available through
//! [`kptau_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::path::Path;
use std::ptr;

use num_complex::Complex64;

use kptau::curve::CurveModel;
use kptau::identities::{genus2_suite, trigonal_suite};
use kptau::periods::{hyperelliptic_periods, PeriodData};
use kptau::tau::{
    affine_from_tau, plucker_giambelli, reconstruction_residual, schur_expansion_table, Gauge,
    TauModel,
};
use kptau::thetasigma::wp_values_default;
use kptau::Error;

/// Status codes mirroring the CLI exit-code contract.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum KptauStatus {
    Ok = 0,
    IoError = 1,
    ValidationError = 2,
    DivisorPoint = 3,
    IdentityFailure = 4,
    InvalidArgument = 5,
}

/// Opaque curve model handle.
pub struct KptauCurve {
    inner: CurveModel,
}

/// Opaque period data handle.
pub struct KptauPeriods {
    inner: PeriodData,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(msg).ok();
    });
}

#[allow(dead_code)]
fn status_of(err: &Error) -> KptauStatus {
    match err {
        Error::Io(_) | Error::Json(_) => KptauStatus::IoError,
        Error::DivisorPoint => KptauStatus::DivisorPoint,
        _ => KptauStatus::ValidationError,
    }
}

fn record<T>(result: Result<T, Error>) -> Option<T> {
    match result {
        Ok(v) => Some(v),
        Err(e) => {
            set_error(e.to_string());
            None
        }
    }
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        set_error("null string argument".into());
        return None;
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Some(s),
        Err(_) => {
            set_error("string argument is not valid UTF-8".into());
            None
        }
    }
}

fn export_string(s: String) -> *mut c_char {
    match CString::new(s) {
        Ok(c) => c.into_raw(),
        Err(_) => {
            set_error("output contained an interior NUL byte".into());
            ptr::null_mut()
        }
    }
}

unsafe fn complex_slice(values: *const c_double, len: usize, g: usize) -> Option<Vec<Complex64>> {
    if values.is_null() {
        set_error("null coordinate buffer".into());
        return None;
    }
    if len != 2 * g {
        set_error(format!("expected {} reals (re,im per coordinate), got {len}", 2 * g));
        return None;
    }
    let raw = unsafe { std::slice::from_raw_parts(values, len) };
    Some(raw.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

/// Message describing the most recent failure on this thread, or NULL.
/// The pointer stays valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn kptau_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(ptr::null())
    })
}

/// Frees a string returned by one of the `_json` functions.
///
/// # Safety
/// `s` must be a pointer previously returned by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn kptau_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parses a curve model from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn kptau_curve_from_json(json: *const c_char) -> *mut KptauCurve {
    let Some(text) = (unsafe { cstr_arg(json) }) else {
        return ptr::null_mut();
    };
    match record(CurveModel::from_json(text)) {
        Some(inner) => Box::into_raw(Box::new(KptauCurve { inner })),
        None => ptr::null_mut(),
    }
}

/// Loads a curve model from a JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn kptau_curve_load(path: *const c_char) -> *mut KptauCurve {
    let Some(p) = (unsafe { cstr_arg(path) }) else {
        return ptr::null_mut();
    };
    match record(CurveModel::load(Path::new(p))) {
        Some(inner) => Box::into_raw(Box::new(KptauCurve { inner })),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `curve` must come from a curve constructor and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn kptau_curve_free(curve: *mut KptauCurve) {
    if !curve.is_null() {
        drop(unsafe { Box::from_raw(curve) });
    }
}

/// Genus of the curve, or -1 on a null handle.
///
/// # Safety
/// `curve` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kptau_curve_genus(curve: *const KptauCurve) -> c_int {
    if curve.is_null() {
        set_error("null curve handle".into());
        return -1;
    }
    unsafe { &*curve }.inner.genus() as c_int
}

/// Computes period matrices for a hyperelliptic curve with real branch
/// points.
///
/// # Safety
/// `curve` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kptau_periods_compute(curve: *const KptauCurve) -> *mut KptauPeriods {
    if curve.is_null() {
        set_error("null curve handle".into());
        return ptr::null_mut();
    }
    let model = &unsafe { &*curve }.inner;
    let CurveModel::Hyperelliptic(h) = model else {
        set_error("periods not computable internally for this curve family".into());
        return ptr::null_mut();
    };
    match record(hyperelliptic_periods(h)) {
        Some(inner) => Box::into_raw(Box::new(KptauPeriods { inner })),
        None => ptr::null_mut(),
    }
}

/// Loads period data from a JSON file, validating its invariants unless
/// `validate` is 0.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn kptau_periods_load(
    path: *const c_char,
    validate: c_int,
) -> *mut KptauPeriods {
    let Some(p) = (unsafe { cstr_arg(path) }) else {
        return ptr::null_mut();
    };
    match record(PeriodData::load(Path::new(p), validate != 0)) {
        Some(inner) => Box::into_raw(Box::new(KptauPeriods { inner })),
        None => ptr::null_mut(),
    }
}

/// Serialises period data to JSON (free with `kptau_string_free`).
///
/// # Safety
/// `periods` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kptau_periods_to_json(periods: *const KptauPeriods) -> *mut c_char {
    if periods.is_null() {
        set_error("null period handle".into());
        return ptr::null_mut();
    }
    export_string(unsafe { &*periods }.inner.to_json())
}

/// # Safety
/// `periods` must come from a period constructor and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn kptau_periods_free(periods: *mut KptauPeriods) {
    if !periods.is_null() {
        drop(unsafe { Box::from_raw(periods) });
    }
}

/// Residual of the generalized Legendre relation; negative on error.
///
/// # Safety
/// `periods` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kptau_periods_legendre_residual(
    periods: *const KptauPeriods,
) -> c_double {
    if periods.is_null() {
        set_error("null period handle".into());
        return -1.0;
    }
    unsafe { &*periods }.inner.legendre_residual()
}

/// Zeta and Kleinian wp tensors at `v` as a JSON document (free with
/// `kptau_string_free`).  `v` holds `2 g` doubles, re/im interleaved;
/// `max_order` is 2..=4.
///
/// # Safety
/// `periods` must be a live handle and `v` must point to `v_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kptau_wp_json(
    periods: *const KptauPeriods,
    v: *const c_double,
    v_len: usize,
    max_order: c_int,
) -> *mut c_char {
    if periods.is_null() {
        set_error("null period handle".into());
        return ptr::null_mut();
    }
    let pd = &unsafe { &*periods }.inner;
    let Some(v) = (unsafe { complex_slice(v, v_len, pd.g) }) else {
        return ptr::null_mut();
    };
    if !(2..=4).contains(&max_order) {
        set_error("max_order must be 2..=4".into());
        return ptr::null_mut();
    }
    let Some(kp) = record(wp_values_default(&v, pd, max_order as usize)) else {
        return ptr::null_mut();
    };
    let g = pd.g;
    let c2 = |z: Complex64| vec![z.re, z.im];
    let mut doc = serde_json::json!({
        "v": v.iter().map(|&z| c2(z)).collect::<Vec<_>>(),
        "sigma": c2(kp.sigma),
        "zeta": kp.zeta.iter().map(|&z| c2(z)).collect::<Vec<_>>(),
        "wp2": (0..g).map(|i| (0..g).map(|j| c2(kp.wp2(i, j))).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    if max_order >= 3 {
        doc["wp3"] = serde_json::json!((0..g)
            .map(|i| (0..g)
                .map(|j| (0..g).map(|k| c2(kp.wp3(i, j, k))).collect::<Vec<_>>())
                .collect::<Vec<_>>())
            .collect::<Vec<_>>());
    }
    if max_order >= 4 {
        doc["wp4"] = serde_json::json!((0..g)
            .map(|i| (0..g)
                .map(|j| (0..g)
                    .map(|k| (0..g).map(|l| c2(kp.wp4(i, j, k, l))).collect::<Vec<_>>())
                    .collect::<Vec<_>>())
                .collect::<Vec<_>>())
            .collect::<Vec<_>>());
    }
    export_string(doc.to_string())
}

/// Schur expansion table plus affine window as JSON (free with
/// `kptau_string_free`).  `gauge` is 0 for sigma, 1 for theta; `v` holds
/// re/im interleaved coordinates.
///
/// # Safety
/// `curve` and `periods` must be live handles; `v` must point to `v_len`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn kptau_expand_json(
    curve: *const KptauCurve,
    periods: *const KptauPeriods,
    v: *const c_double,
    v_len: usize,
    max_weight: c_int,
    gauge: c_int,
) -> *mut c_char {
    if curve.is_null() || periods.is_null() {
        set_error("null handle".into());
        return ptr::null_mut();
    }
    let model = &unsafe { &*curve }.inner;
    let pd = &unsafe { &*periods }.inner;
    let Some(v) = (unsafe { complex_slice(v, v_len, pd.g) }) else {
        return ptr::null_mut();
    };
    if !(1..=10).contains(&max_weight) {
        set_error("max_weight must be 1..=10".into());
        return ptr::null_mut();
    }
    let gauge = match gauge {
        0 => Gauge::Sigma,
        1 => Gauge::Theta,
        _ => {
            set_error("gauge must be 0 (sigma) or 1 (theta)".into());
            return ptr::null_mut();
        }
    };
    let Some(model) = record(TauModel::new(
        model.clone(),
        pd.clone(),
        v,
        max_weight as u32,
        gauge,
    )) else {
        return ptr::null_mut();
    };
    let tau = model.build();
    let Some(table) = record(schur_expansion_table(&tau, max_weight as u32)) else {
        return ptr::null_mut();
    };
    let Some(recon) = record(reconstruction_residual(&tau, &table)) else {
        return ptr::null_mut();
    };
    let window = ((max_weight as u32).saturating_sub(1) / 2) as usize;
    let Some(aff) = record(affine_from_tau(&tau, window)) else {
        return ptr::null_mut();
    };
    let mut giambelli_residual = 0.0f64;
    for (lambda, direct) in &table.entries {
        let fc = kptau::partitions::frobenius_of(lambda);
        if fc.arms.iter().chain(&fc.legs).any(|&x| x as usize > window) {
            continue;
        }
        let Some(gia) = record(plucker_giambelli(&aff, lambda)) else {
            return ptr::null_mut();
        };
        giambelli_residual = giambelli_residual.max((gia - direct).norm() / direct.norm().max(1.0));
    }
    let doc = serde_json::json!({
        "max_weight": max_weight,
        "giambelli_residual": giambelli_residual,
        "reconstruction_residual": recon,
        "entries": table.entries.iter().map(|(p, z)| serde_json::json!({
            "partition": p.parts(),
            "frobenius": kptau::partitions::frobenius_of(p).to_string(),
            "value": [z.re, z.im],
        })).collect::<Vec<_>>(),
        "affine": aff.a.iter().map(|row| row.iter().map(|z| vec![z.re, z.im]).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    export_string(doc.to_string())
}

/// Runs the identity suites and returns the report list as JSON (free
/// with `kptau_string_free`).  `periods` may be NULL, in which case
/// genus-2 periods are computed on the fly and the trigonal suite reports
/// not-run.  Writes the overall status through `status_out` when
/// non-null: `Ok` or `IdentityFailure`.
///
/// # Safety
/// `curve` must be a live handle; `periods` must be live or NULL;
/// `status_out` must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn kptau_verify_json(
    curve: *const KptauCurve,
    periods: *const KptauPeriods,
    samples: c_int,
    tol: c_double,
    seed: u64,
    status_out: *mut KptauStatus,
) -> *mut c_char {
    if curve.is_null() {
        set_error("null curve handle".into());
        return ptr::null_mut();
    }
    if samples <= 0 || tol <= 0.0 {
        set_error("samples and tol must be positive".into());
        return ptr::null_mut();
    }
    let model = &unsafe { &*curve }.inner;
    let pd = if periods.is_null() {
        None
    } else {
        Some(unsafe { &*periods }.inner.clone())
    };
    let mut reports = Vec::new();
    if let CurveModel::Hyperelliptic(h) = model {
        if h.genus() == 2 {
            let pd = match pd.clone() {
                Some(pd) => pd,
                None => match record(hyperelliptic_periods(h)) {
                    Some(pd) => pd,
                    None => return ptr::null_mut(),
                },
            };
            match record(genus2_suite(h, &pd, samples as usize, tol, seed)) {
                Some(r) => reports.extend(r),
                None => return ptr::null_mut(),
            }
        }
    }
    let trig_pd = match model {
        CurveModel::CyclicTrigonal(_) => pd.as_ref(),
        _ => None,
    };
    match record(trigonal_suite(model, trig_pd, samples as usize, tol, seed)) {
        Some(r) => reports.extend(r),
        None => return ptr::null_mut(),
    }
    let failed = reports.iter().any(|r| !r.pass);
    if !status_out.is_null() {
        unsafe {
            *status_out = if failed { KptauStatus::IdentityFailure } else { KptauStatus::Ok };
        }
    }
    match serde_json::to_string_pretty(&reports) {
        Ok(s) => export_string(s),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve_json() -> CString {
        CString::new(r#"{"type":"hyperelliptic","branch_points":[-2.0,-1.0,0.0,1.0,2.0]}"#)
            .unwrap()
    }

    #[test]
    fn curve_and_period_lifecycle() {
        unsafe {
            let curve = kptau_curve_from_json(curve_json().as_ptr());
            assert!(!curve.is_null());
            assert_eq!(kptau_curve_genus(curve), 2);

            let periods = kptau_periods_compute(curve);
            assert!(!periods.is_null());
            assert!(kptau_periods_legendre_residual(periods) < 1e-8);

            let json = kptau_periods_to_json(periods);
            assert!(!json.is_null());
            let text = CStr::from_ptr(json).to_str().unwrap().to_string();
            assert!(text.contains("\"A\""));
            kptau_string_free(json);

            kptau_periods_free(periods);
            kptau_curve_free(curve);
        }
    }

    #[test]
    fn expand_and_wp_roundtrip() {
        unsafe {
            let curve = kptau_curve_from_json(curve_json().as_ptr());
            let periods = kptau_periods_compute(curve);
            let v = [0.31, 0.12, -0.42, 0.2];

            let wp = kptau_wp_json(periods, v.as_ptr(), v.len(), 3);
            assert!(!wp.is_null(), "{:?}", CStr::from_ptr(kptau_last_error()));
            let parsed: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(wp).to_str().unwrap()).unwrap();
            assert_eq!(parsed["wp2"][0][1], parsed["wp2"][1][0]);
            kptau_string_free(wp);

            let expand = kptau_expand_json(curve, periods, v.as_ptr(), v.len(), 6, 0);
            assert!(!expand.is_null());
            let parsed: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(expand).to_str().unwrap()).unwrap();
            assert!(parsed["giambelli_residual"].as_f64().unwrap() < 1e-6);
            kptau_string_free(expand);

            kptau_periods_free(periods);
            kptau_curve_free(curve);
        }
    }

    #[test]
    fn verify_reports_and_status() {
        unsafe {
            let curve = kptau_curve_from_json(curve_json().as_ptr());
            let mut status = KptauStatus::IdentityFailure;
            let report = kptau_verify_json(curve, ptr::null(), 4, 1e-6, 0, &mut status);
            assert!(!report.is_null());
            assert!(matches!(status, KptauStatus::Ok));
            let text = CStr::from_ptr(report).to_str().unwrap();
            assert!(text.contains("not_run"), "trigonal rows gated: {text}");
            kptau_string_free(report);
            kptau_curve_free(curve);
        }
    }

    #[test]
    fn errors_are_reported() {
        unsafe {
            let bad = CString::new("{\"type\":\"unknown\"}").unwrap();
            let curve = kptau_curve_from_json(bad.as_ptr());
            assert!(curve.is_null());
            let msg = kptau_last_error();
            assert!(!msg.is_null());
        }
    }

    #[test]
    fn generated_header_is_current() {
        let root = Path::new(env!("CARGO_MANIFEST_DIR"));
        let config = cbindgen::Config::from_file(root.join("cbindgen.toml")).unwrap();
        let generated = cbindgen::Builder::new()
            .with_crate(root)
            .with_config(config)
            .generate()
            .unwrap();
        let mut buf = Vec::new();
        generated.write(&mut buf);
        let generated = String::from_utf8(buf).unwrap();
        let committed = std::fs::read_to_string(root.join("include/kptau.h")).unwrap();
        assert_eq!(
            generated.replace("\r\n", "\n"),
            committed.replace("\r\n", "\n"),
            "include/kptau.h is stale; regenerate it with cbindgen"
        );
    }
}
