//! C ABI over `qht-core`.
//!
//! Scenarios and time series are opaque heap handles created and released
//! through this API. Every fallible call returns a [`QhtStatus`]; on failure
//! [`qht_last_error_message`] describes the error for the calling thread.
//! Panics never cross the boundary and are reported as `QHT_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qht_core::config::parse_config;
use qht_core::discrimination::{self, TimeSeries};
use qht_core::experiments;
use qht_core::linalg::DensityMatrix;
use qht_core::{Error, Scenario};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QhtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnphysicalNoise = 3,
    Config = 4,
    DegenerateHypotheses = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

/// Opaque scenario handle.
pub struct QhtScenario {
    inner: Scenario,
}

/// Opaque time-series handle.
pub struct QhtTimeSeries {
    inner: TimeSeries,
}

/// One row of a time series.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QhtSample {
    pub t_s: f64,
    pub p_noisy: f64,
    pub p_unitary: f64,
    pub p_unitary_ceiling: f64,
    pub trace_distance_noisy: f64,
    pub trace_distance_unitary: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QhtConditions {
    pub x1: f64,
    pub y1: f64,
    pub z1: f64,
    pub w1: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub cond1: bool,
    pub cond2: bool,
    pub degenerate: bool,
    pub near_boundary: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QhtEnhancement {
    pub eta: f64,
    pub t_star_s: f64,
    pub exceeds_unitary_max: bool,
    pub eta_same_probe: f64,
    pub t_star_same_probe_s: f64,
    pub p_noisy_max: f64,
    pub t_noisy_max_s: f64,
    pub unitary_max: f64,
    pub unitary_ceiling_max: f64,
    pub exceeds_same_probe_max: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QhtChernoff {
    pub s_star: f64,
    pub q_star: f64,
    /// `+inf` when `q_star` is numerically zero.
    pub exponent: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QhtStatus {
    match e {
        Error::InvalidArgument(_) => QhtStatus::InvalidArgument,
        Error::UnphysicalNoise(_) => QhtStatus::UnphysicalNoise,
        Error::Config(_) => QhtStatus::Config,
        Error::DegenerateHypotheses { .. } | Error::DegenerateAxis => QhtStatus::DegenerateHypotheses,
        Error::Positivity { .. } | Error::Numerical(_) => QhtStatus::Numerical,
        Error::Io(_) => QhtStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Runs `f`, converting errors and panics into a status and a message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QhtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QhtStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer passed as {what}"));
            QhtStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            QhtStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or points to a valid, properly aligned `T`.
unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

/// # Safety
/// `p` is null or points to writable memory for one `T`.
unsafe fn write_out<T>(p: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(value);
    Ok(())
}

fn box_scenario(s: Scenario) -> *mut QhtScenario {
    Box::into_raw(Box::new(QhtScenario { inner: s }))
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qht_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qht_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a scenario from TOML config text (same format as the CLI).
///
/// # Safety
/// `toml` is a NUL-terminated UTF-8 string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qht_scenario_from_config(toml: *const c_char, out: *mut *mut QhtScenario) -> QhtStatus {
    guard(|| {
        if toml.is_null() {
            return Err(Failure::Null("toml"));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|_| Error::InvalidArgument("config text is not valid UTF-8".into()))?;
        let cfg = parse_config(text)?;
        write_out(out, box_scenario(cfg.scenario), "out")
    })
}

/// Tilted-field reference scenario at T1 = 5.5 s.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qht_scenario_fig3(t2: f64, out: *mut *mut QhtScenario) -> QhtStatus {
    guard(|| {
        let s = experiments::scenario_fig3(t2)?;
        write_out(out, box_scenario(s), "out")
    })
}

/// Control-field reference scenario at T1 = 7.4 s.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qht_scenario_fig4(t2: f64, bc_nt: f64, out: *mut *mut QhtScenario) -> QhtStatus {
    guard(|| {
        let s = experiments::scenario_fig4(t2, bc_nt)?;
        write_out(out, box_scenario(s), "out")
    })
}

/// Replaces the time grid of a scenario.
///
/// # Safety
/// `scenario` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn qht_scenario_set_grid(scenario: *mut QhtScenario, horizon_s: f64, points: usize) -> QhtStatus {
    guard(|| {
        let s = scenario.as_mut().ok_or(Failure::Null("scenario"))?;
        let mut next = s.inner;
        next.horizon = horizon_s;
        next.grid_points = points;
        next.validate()?;
        s.inner = next;
        Ok(())
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `scenario` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qht_scenario_free(scenario: *mut QhtScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Computes the success-probability curves on the scenario's grid.
///
/// # Safety
/// `scenario` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qht_success_curve(scenario: *const QhtScenario, out: *mut *mut QhtTimeSeries) -> QhtStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let series = discrimination::success_curve(&s.inner)?;
        write_out(out, Box::into_raw(Box::new(QhtTimeSeries { inner: series })), "out")
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `series` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qht_series_len(series: *const QhtTimeSeries) -> usize {
    series.as_ref().map_or(0, |s| s.inner.len())
}

/// Copies sample `index` into `out`.
///
/// # Safety
/// `series` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qht_series_get(series: *const QhtTimeSeries, index: usize, out: *mut QhtSample) -> QhtStatus {
    guard(|| {
        let s = &deref(series, "series")?.inner;
        if index >= s.len() {
            return Err(Error::InvalidArgument(format!("index {index} out of range for {} samples", s.len())).into());
        }
        let sample = QhtSample {
            t_s: s.times[index],
            p_noisy: s.p_noisy[index],
            p_unitary: s.p_unitary[index],
            p_unitary_ceiling: s.p_unitary_ceiling[index],
            trace_distance_noisy: s.trace_distance_noisy[index],
            trace_distance_unitary: s.trace_distance_unitary[index],
        };
        write_out(out, sample, "out")
    })
}

/// Releases a time series. Null is ignored.
///
/// # Safety
/// `series` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qht_series_free(series: *mut QhtTimeSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Evaluates the two early-advantage conditions.
///
/// # Safety
/// `scenario` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qht_check_conditions(scenario: *const QhtScenario, out: *mut QhtConditions) -> QhtStatus {
    guard(|| {
        let r = discrimination::check_conditions(&deref(scenario, "scenario")?.inner)?;
        let c = QhtConditions {
            x1: r.x1,
            y1: r.y1,
            z1: r.z1,
            w1: r.w1,
            lambda_max: r.lambda_max,
            lambda_min: r.lambda_min,
            cond1: r.cond1,
            cond2: r.cond2,
            degenerate: r.degenerate,
            near_boundary: r.near_boundary,
        };
        write_out(out, c, "out")
    })
}

/// Enhancement of the noisy curve over the unitary bound.
///
/// # Safety
/// `scenario` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qht_enhancement(scenario: *const QhtScenario, out: *mut QhtEnhancement) -> QhtStatus {
    guard(|| {
        let (r, _) = discrimination::enhancement_eta(&deref(scenario, "scenario")?.inner)?;
        let e = QhtEnhancement {
            eta: r.eta,
            t_star_s: r.t_star,
            exceeds_unitary_max: r.exceeds_unitary_max,
            eta_same_probe: r.eta_same_probe,
            t_star_same_probe_s: r.t_star_same_probe,
            p_noisy_max: r.p_noisy_max,
            t_noisy_max_s: r.t_noisy_max,
            unitary_max: r.unitary_max,
            unitary_ceiling_max: r.unitary_ceiling_max,
            exceeds_same_probe_max: r.exceeds_same_probe_max,
        };
        write_out(out, e, "out")
    })
}

/// Success-probability plateau under dominant dephasing for field angles
/// `theta0_deg` and `theta1_deg`.
#[no_mangle]
pub extern "C" fn qht_strong_dephasing_limit(theta0_deg: f64, theta1_deg: f64) -> f64 {
    discrimination::strong_dephasing_limit(theta0_deg, theta1_deg)
}

/// Quantum Chernoff quantity of two qubit states given by Bloch vectors.
///
/// # Safety
/// `bloch0` and `bloch1` point to three doubles each; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn qht_chernoff(bloch0: *const f64, bloch1: *const f64, out: *mut QhtChernoff) -> QhtStatus {
    guard(|| {
        let read = |p: *const f64, what| -> Result<[f64; 3], Failure> {
            if p.is_null() {
                return Err(Failure::Null(what));
            }
            Ok([*p, *p.add(1), *p.add(2)])
        };
        let a = DensityMatrix::from_bloch(read(bloch0, "bloch0")?)?;
        let b = DensityMatrix::from_bloch(read(bloch1, "bloch1")?)?;
        let r = discrimination::chernoff(&a, &b)?;
        write_out(
            out,
            QhtChernoff {
                s_star: r.s_star,
                q_star: r.q_star,
                exponent: r.exponent,
            },
            "out",
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping_covers_every_error() {
        assert_eq!(
            status_of(&Error::UnphysicalNoise(String::new())),
            QhtStatus::UnphysicalNoise
        );
        assert_eq!(status_of(&Error::DegenerateAxis), QhtStatus::DegenerateHypotheses);
        assert_eq!(
            status_of(&Error::Positivity {
                t: 0.0,
                min_eigenvalue: -1.0
            }),
            QhtStatus::Numerical
        );
        assert_eq!(status_of(&Error::Io(String::new())), QhtStatus::Io);
    }

    #[test]
    fn panics_become_a_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, QhtStatus::Panic);
        let msg = unsafe { CStr::from_ptr(qht_last_error_message()) }.to_str().unwrap();
        assert!(msg.contains("boom"));
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(qht_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
