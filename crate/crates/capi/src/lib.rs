//! C ABI for the core estimation library: opaque handles, integer status
//! codes, and JSON strings for structured reports. The generated header
//! lives in `include/specbound.h`.
//!
//! Conventions:
//! - functions returning `sb_status` report failure details through
//!   [`sb_last_error_message`] (thread-local, valid until the next call);
//! - functions returning pointers yield NULL on failure;
//! - every returned object has exactly one matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use specbound::cli::{run_scenario, RunConfig};
use specbound::sampling::{simulate, ProcessModel, SampleSeries, SeriesMeta};
use specbound::{
    solve_dual, solve_maxent, AngularGrid, CovarianceSequence, EstimatorProblem, SolverOptions,
    TrigPolynomial,
};

/// Status codes: 0 success, 2 invalid input, 3 solver failure.
#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum sb_status {
    SB_OK = 0,
    SB_ERR_VALIDATION = 2,
    SB_ERR_SOLVER = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(err: &specbound::Error) -> sb_status {
    let message = CString::new(format!("{}: {err}", err.kind()))
        .unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
    if err.exit_code() == 3 {
        sb_status::SB_ERR_SOLVER
    } else {
        sb_status::SB_ERR_VALIDATION
    }
}

fn set_error_message(message: &str) -> sb_status {
    let message = CString::new(message).unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
    sb_status::SB_ERR_VALIDATION
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by a `sb_*_json` function and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() || len == 0 {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

fn solver_options(tolerance: f64, max_iterations: usize) -> SolverOptions {
    let mut opts = SolverOptions::default();
    if tolerance > 0.0 {
        opts.tolerance = tolerance;
    }
    if max_iterations > 0 {
        opts.max_iterations = max_iterations;
    }
    opts
}

/// Spectral density evaluated on a uniform grid over [-pi, pi), plus the
/// coefficient vector that parameterizes it (denominator coefficients for
/// the rational estimate, Lagrange coefficients for maxent).
#[allow(non_camel_case_types)]
pub struct sb_density {
    values: Vec<f64>,
    coeffs: Vec<f64>,
}

/// Rational estimate P/Q from a covariance window.
///
/// `prior`/`prior_len` may be NULL/0 for the flat prior P = 1. Non-positive
/// `tolerance`/`max_iterations` select the defaults. Returns NULL on failure
/// (see [`sb_last_error_message`]).
///
/// # Safety
/// `lags` must point to `lags_len` readable doubles; `prior`, when non-NULL,
/// to `prior_len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn sb_estimate(
    lags: *const f64,
    lags_len: usize,
    prior: *const f64,
    prior_len: usize,
    grid_size: usize,
    tolerance: f64,
    max_iterations: usize,
) -> *mut sb_density {
    clear_error();
    let Some(lags) = slice_arg(lags, lags_len) else {
        set_error_message("lags pointer is NULL or empty");
        return std::ptr::null_mut();
    };
    let prior = slice_arg(prior, prior_len);
    let go = || -> specbound::Result<sb_density> {
        let grid = AngularGrid::new(grid_size)?;
        let window = CovarianceSequence::new(lags.to_vec())?;
        let prior_poly = match prior {
            Some(p) => TrigPolynomial::new(p.to_vec())?,
            None => TrigPolynomial::one(),
        };
        let problem = EstimatorProblem::new(window, prior_poly, grid)?;
        let solution = solve_dual(&problem, &solver_options(tolerance, max_iterations))?;
        Ok(sb_density {
            values: solution.density(grid)?.values().to_vec(),
            coeffs: solution.denominator().coeffs().to_vec(),
        })
    };
    match go() {
        Ok(density) => Box::into_raw(Box::new(density)),
        Err(e) => {
            set_error(&e);
            std::ptr::null_mut()
        }
    }
}

/// Maximum-entropy density matching a covariance window; the coefficient
/// vector holds the Lagrange coefficients.
///
/// # Safety
/// `lags` must point to `lags_len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn sb_maxent(
    lags: *const f64,
    lags_len: usize,
    grid_size: usize,
    tolerance: f64,
    max_iterations: usize,
) -> *mut sb_density {
    clear_error();
    let Some(lags) = slice_arg(lags, lags_len) else {
        set_error_message("lags pointer is NULL or empty");
        return std::ptr::null_mut();
    };
    let go = || -> specbound::Result<sb_density> {
        let grid = AngularGrid::new(grid_size)?;
        let window = CovarianceSequence::new(lags.to_vec())?;
        let solution = solve_maxent(&window, grid, &solver_options(tolerance, max_iterations))?;
        Ok(sb_density {
            values: solution.density(grid).values().to_vec(),
            coeffs: solution.lambdas().to_vec(),
        })
    };
    match go() {
        Ok(density) => Box::into_raw(Box::new(density)),
        Err(e) => {
            set_error(&e);
            std::ptr::null_mut()
        }
    }
}

/// Number of grid values held by a density handle.
///
/// # Safety
/// `density` must be a live handle from [`sb_estimate`] or [`sb_maxent`].
#[no_mangle]
pub unsafe extern "C" fn sb_density_len(density: *const sb_density) -> usize {
    density.as_ref().map_or(0, |d| d.values.len())
}

/// Copies the density values into `out` (capacity `out_len`); returns the
/// number of values copied.
///
/// # Safety
/// `density` must be a live handle; `out` must point to `out_len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn sb_density_values(
    density: *const sb_density,
    out: *mut f64,
    out_len: usize,
) -> usize {
    let Some(d) = density.as_ref() else { return 0 };
    if out.is_null() {
        return 0;
    }
    let n = d.values.len().min(out_len);
    std::ptr::copy_nonoverlapping(d.values.as_ptr(), out, n);
    n
}

/// Number of parameter coefficients held by a density handle.
///
/// # Safety
/// `density` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sb_density_coeffs_len(density: *const sb_density) -> usize {
    density.as_ref().map_or(0, |d| d.coeffs.len())
}

/// Copies the parameter coefficients into `out`; returns the number copied.
///
/// # Safety
/// `density` must be a live handle; `out` must point to `out_len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn sb_density_coeffs(
    density: *const sb_density,
    out: *mut f64,
    out_len: usize,
) -> usize {
    let Some(d) = density.as_ref() else { return 0 };
    if out.is_null() {
        return 0;
    }
    let n = d.coeffs.len().min(out_len);
    std::ptr::copy_nonoverlapping(d.coeffs.as_ptr(), out, n);
    n
}

/// # Safety
/// `density` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sb_density_free(density: *mut sb_density) {
    if !density.is_null() {
        drop(Box::from_raw(density));
    }
}

/// Simulated sample path handle.
#[allow(non_camel_case_types)]
pub struct sb_series {
    values: Vec<f64>,
}

/// Simulates a stationary process described by a JSON model spec, e.g.
/// `{"kind":"ar","coeffs":[0.5],"innovation_variance":1.0}`.
///
/// # Safety
/// `model_json` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn sb_simulate(
    model_json: *const c_char,
    length: usize,
    seed: u64,
) -> *mut sb_series {
    clear_error();
    if model_json.is_null() {
        set_error_message("model_json is NULL");
        return std::ptr::null_mut();
    }
    let text = match CStr::from_ptr(model_json).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error_message("model_json is not UTF-8");
            return std::ptr::null_mut();
        }
    };
    let model: ProcessModel = match serde_json::from_str(text) {
        Ok(m) => m,
        Err(e) => {
            set_error_message(&format!("bad model spec: {e}"));
            return std::ptr::null_mut();
        }
    };
    match simulate(&model, length, seed) {
        Ok(series) => Box::into_raw(Box::new(sb_series {
            values: series.values().to_vec(),
        })),
        Err(e) => {
            set_error(&e);
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `series` must be a live handle from [`sb_simulate`].
#[no_mangle]
pub unsafe extern "C" fn sb_series_len(series: *const sb_series) -> usize {
    series.as_ref().map_or(0, |s| s.values.len())
}

/// Copies sample values into `out`; returns the number copied.
///
/// # Safety
/// `series` must be a live handle; `out` must point to `out_len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn sb_series_values(
    series: *const sb_series,
    out: *mut f64,
    out_len: usize,
) -> usize {
    let Some(s) = series.as_ref() else { return 0 };
    if out.is_null() {
        return 0;
    }
    let n = s.values.len().min(out_len);
    std::ptr::copy_nonoverlapping(s.values.as_ptr(), out, n);
    n
}

/// # Safety
/// `series` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sb_series_free(series: *mut sb_series) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Sample lag estimates from raw observations; writes `order + 1` doubles
/// into `out`.
///
/// # Safety
/// `values` must point to `values_len` readable doubles and `out` to
/// `order + 1` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sb_estimate_lags(
    values: *const f64,
    values_len: usize,
    order: usize,
    out: *mut f64,
) -> sb_status {
    clear_error();
    let Some(values) = slice_arg(values, values_len) else {
        return set_error_message("values pointer is NULL or empty");
    };
    if out.is_null() {
        return set_error_message("out pointer is NULL");
    }
    let go = || -> specbound::Result<Vec<f64>> {
        let series = SampleSeries::new(
            values.to_vec(),
            SeriesMeta {
                model: "ffi".into(),
                seed: 0,
            },
        )?;
        series.estimate_lags(order)
    };
    match go() {
        Ok(lags) => {
            std::ptr::copy_nonoverlapping(lags.as_ptr(), out, lags.len());
            sb_status::SB_OK
        }
        Err(e) => set_error(&e),
    }
}

/// Entropy-difference-to-TV map B(kl) = 3*sqrt(-1 + sqrt(1 + 4*kl/9)).
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn sb_tv_from_kl(kl: f64, out: *mut f64) -> sb_status {
    clear_error();
    if out.is_null() {
        return set_error_message("out pointer is NULL");
    }
    match specbound::bounds::tv_from_kl(kl) {
        Ok(v) => {
            *out = v;
            sb_status::SB_OK
        }
        Err(e) => set_error(&e),
    }
}

fn config_from_c(config_json: *const c_char) -> Result<RunConfig, sb_status> {
    if config_json.is_null() {
        return Err(set_error_message("config_json is NULL"));
    }
    let text = unsafe { CStr::from_ptr(config_json) }
        .to_str()
        .map_err(|_| set_error_message("config_json is not UTF-8"))?;
    let config: RunConfig =
        serde_json::from_str(text).map_err(|e| set_error_message(&format!("bad config: {e}")))?;
    config.validate_caps().map_err(|e| set_error(&e))?;
    Ok(config)
}

fn json_out(value: &specbound::cli::ValidationReport) -> *mut c_char {
    match serde_json::to_string_pretty(value) {
        Ok(text) => CString::new(text)
            .map(CString::into_raw)
            .unwrap_or(std::ptr::null_mut()),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Computes a bound report from a run-config JSON document with a `bounds`
/// block (same schema as the CLI config). Returns the report as a JSON
/// string to be freed with [`sb_string_free`], or NULL on failure.
///
/// # Safety
/// `config_json` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn sb_bounds_json(config_json: *const c_char) -> *mut c_char {
    clear_error();
    let config = match config_from_c(config_json) {
        Ok(c) => c,
        Err(_) => return std::ptr::null_mut(),
    };
    let dir = std::env::temp_dir().join(format!(
        "specbound-capi-{}-{:x}",
        std::process::id(),
        &config as *const _ as usize
    ));
    let inv = specbound::cli::Invocation {
        config,
        out_dir: dir.clone(),
        ..Default::default()
    };
    let result = specbound::cli::cmd_bounds(&inv)
        .and_then(|_| Ok(std::fs::read_to_string(dir.join("bound_report.json"))?));
    let _ = std::fs::remove_dir_all(&dir);
    match result {
        Ok(text) => CString::new(text)
            .map(CString::into_raw)
            .unwrap_or(std::ptr::null_mut()),
        Err(e) => {
            set_error(&e);
            std::ptr::null_mut()
        }
    }
}

/// Runs a Monte Carlo validation scenario from a run-config JSON document
/// with a `validate` block; returns the validation report as JSON.
///
/// # Safety
/// `config_json` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn sb_validate_json(config_json: *const c_char, seed: u64) -> *mut c_char {
    clear_error();
    let config = match config_from_c(config_json) {
        Ok(c) => c,
        Err(_) => return std::ptr::null_mut(),
    };
    let Some(validate) = config.validate.clone() else {
        set_error_message("config has no `validate` block");
        return std::ptr::null_mut();
    };
    let go = || -> specbound::Result<*mut c_char> {
        let grid = AngularGrid::new(config.grid_size_or_default())?;
        let report = run_scenario(
            &validate.scenario,
            grid,
            &config.solver_or_default(),
            seed,
            validate.allowance,
        )?;
        Ok(json_out(&report))
    };
    match go() {
        Ok(ptr) => ptr,
        Err(e) => {
            set_error(&e);
            std::ptr::null_mut()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn estimate_round_trip_through_the_c_surface() {
        let lags = [4.0 / 3.0, 2.0 / 3.0];
        let density = unsafe { sb_estimate(lags.as_ptr(), 2, std::ptr::null(), 0, 512, 0.0, 0) };
        assert!(!density.is_null());
        let n = unsafe { sb_density_len(density) };
        assert_eq!(n, 512);
        let mut values = vec![0.0; n];
        assert_eq!(
            unsafe { sb_density_values(density, values.as_mut_ptr(), n) },
            n
        );
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((max - 4.0).abs() < 1e-6, "max {max}");
        let mut coeffs = vec![0.0; unsafe { sb_density_coeffs_len(density) }];
        unsafe { sb_density_coeffs(density, coeffs.as_mut_ptr(), coeffs.len()) };
        assert!((coeffs[0] - 1.25).abs() < 1e-8);
        assert!((coeffs[1] + 0.5).abs() < 1e-8);
        unsafe { sb_density_free(density) };
    }

    #[test]
    fn errors_set_status_and_message() {
        let lags = [1.0, 2.0]; // |r1| > r0: not a covariance window
        let density = unsafe { sb_estimate(lags.as_ptr(), 2, std::ptr::null(), 0, 512, 0.0, 0) };
        assert!(density.is_null());
        let msg = sb_last_error_message();
        assert!(!msg.is_null());
        let text = unsafe { CStr::from_ptr(msg) }.to_str().unwrap();
        assert!(
            text.contains("Invalid") || text.contains("ToeplitzNotPd"),
            "{text}"
        );
    }

    #[test]
    fn maxent_flat_window_through_c() {
        let lags = [2.5, 0.0];
        let density = unsafe { sb_maxent(lags.as_ptr(), 2, 256, 0.0, 0) };
        assert!(!density.is_null());
        let mut values = vec![0.0; unsafe { sb_density_len(density) }];
        unsafe { sb_density_values(density, values.as_mut_ptr(), values.len()) };
        assert!(values.iter().all(|v| (v - 2.5).abs() < 1e-8));
        unsafe { sb_density_free(density) };
    }

    #[test]
    fn simulate_and_estimate_lags_through_c() {
        let model =
            CString::new(r#"{"kind":"ar","coeffs":[0.5],"innovation_variance":1.0}"#).unwrap();
        let series = unsafe { sb_simulate(model.as_ptr(), 50_000, 7) };
        assert!(!series.is_null());
        let n = unsafe { sb_series_len(series) };
        assert_eq!(n, 50_000);
        let mut values = vec![0.0; n];
        unsafe { sb_series_values(series, values.as_mut_ptr(), n) };
        let mut lags = vec![0.0; 2];
        let status = unsafe { sb_estimate_lags(values.as_ptr(), n, 1, lags.as_mut_ptr()) };
        assert_eq!(status, sb_status::SB_OK);
        assert!((lags[1] / lags[0] - 0.5).abs() < 0.05, "{lags:?}");
        unsafe { sb_series_free(series) };
    }

    #[test]
    fn tv_from_kl_through_c() {
        let mut out = 0.0;
        assert_eq!(unsafe { sb_tv_from_kl(0.0, &mut out) }, sb_status::SB_OK);
        assert_eq!(out, 0.0);
        assert_eq!(
            unsafe { sb_tv_from_kl(-1.0, &mut out) },
            sb_status::SB_ERR_SOLVER
        );
    }

    #[test]
    fn bounds_json_through_c() {
        let config = CString::new(
            r#"{
                "grid_size": 512,
                "bounds": {
                    "kind": "noise",
                    "clean_lags": [1.0, 0.0],
                    "noise_lags": [0.2, 0.0]
                }
            }"#,
        )
        .unwrap();
        let report = unsafe { sb_bounds_json(config.as_ptr()) };
        assert!(!report.is_null(), "error: {:?}", unsafe {
            CStr::from_ptr(sb_last_error_message()).to_str()
        });
        let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_owned();
        unsafe { sb_string_free(report) };
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["schema"], "specbound-report/1");
        let bound = value["bound_value"].as_f64().unwrap();
        assert!(
            (bound - 2.0 * std::f64::consts::PI * 0.2).abs() < 1e-3,
            "{bound}"
        );
    }

    #[test]
    fn validate_json_through_c() {
        let config = CString::new(
            r#"{
                "grid_size": 256,
                "validate": {
                    "allowance": 1.0,
                    "scenario": {
                        "bound": "kl_lower",
                        "model": {"kind": "ar", "coeffs": [0.5], "innovation_variance": 1.0},
                        "order": 1, "delta": 0.1, "n_samples": 1000, "trials": 100
                    }
                }
            }"#,
        )
        .unwrap();
        let report = unsafe { sb_validate_json(config.as_ptr(), 3) };
        assert!(!report.is_null());
        let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_owned();
        unsafe { sb_string_free(report) };
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["schema"], "specbound-validation/1");
        assert_eq!(value["trials"], 100);
    }
}
