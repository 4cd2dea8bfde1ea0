//! C ABI over the gridflex library.
//!
//! Every function returns a [`GfStatus`]; results travel through out
//! pointers. Handles are opaque and must be released with the matching
//! `*_free` function. On any non-OK status the calling thread can fetch a
//! human-readable message with [`gf_last_error_message`]; the returned
//! pointer stays valid until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use gridflex::config::{preset_grid, ScenarioConfig};
use gridflex::grid::GridSpec;
use gridflex::sim::{run_campaign, run_once, Scenario};
use gridflex::wind::{estimate_dtmc, ErrorSeries, WindDtmc};
use gridflex::GridflexError;

/// Result code of every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfStatus {
    GfOk = 0,
    /// A required pointer argument was null.
    GfNullPointer = 1,
    /// An argument or configuration value is invalid.
    GfInvalidArgument = 2,
    /// File system failure.
    GfIo = 3,
    /// A file exists but does not parse.
    GfFormat = 4,
    /// The problem is well-formed but has no solution.
    GfInfeasible = 5,
    /// A numeric routine failed to converge.
    GfNumeric = 6,
    /// Unexpected internal failure.
    GfInternal = 7,
}

/// Opaque grid definition handle.
pub struct GfGrid(GridSpec);
/// Opaque wind forecast-error chain handle.
pub struct GfDtmc(WindDtmc);
/// Opaque runnable scenario handle.
pub struct GfScenario(Scenario);

/// Aggregate outcome of a batch of seeded runs.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GfCampaignSummary {
    pub n_runs: usize,
    pub n_failed: usize,
    pub failure_rate: f64,
    /// 1 when at least one run succeeded and the J statistics below are
    /// meaningful, 0 otherwise.
    pub has_aggregate: u8,
    /// Mean deviation integral over the non-failed runs (Hz*h).
    pub mean_j_hz_h: f64,
    /// Two-sided 95% confidence half-width of the mean.
    pub ci95_half_width: f64,
    /// Mean per-iteration solve time (s).
    pub mean_solve_time_s: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("nul bytes stripped");
    });
}

fn status_of(err: &GridflexError) -> GfStatus {
    match err {
        GridflexError::Argument(_)
        | GridflexError::Config(_)
        | GridflexError::InvalidSpec(_)
        | GridflexError::Dimension(_) => GfStatus::GfInvalidArgument,
        GridflexError::Io(_) => GfStatus::GfIo,
        GridflexError::Json(_)
        | GridflexError::Csv(_)
        | GridflexError::CsvFormat { .. }
        | GridflexError::DegenerateData(_) => GfStatus::GfFormat,
        GridflexError::InfeasibleSchedule { .. }
        | GridflexError::ActionExhausted
        | GridflexError::DegenerateCampaign => GfStatus::GfInfeasible,
        GridflexError::NewtonDiverged { .. } => GfStatus::GfNumeric,
        GridflexError::Protocol(_) => GfStatus::GfInternal,
    }
}

fn fail(err: GridflexError) -> GfStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Runs a closure, converting panics into `GfInternal` instead of letting
/// them unwind across the ABI boundary.
fn guarded(f: impl FnOnce() -> GfStatus) -> GfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            GfStatus::GfInternal
        }
    }
}

/// # Safety
/// `ptr` must be a valid nul-terminated UTF-8 string.
unsafe fn cstr_arg(ptr: *const c_char) -> Result<&'static str, GfStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(GfStatus::GfNullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        GfStatus::GfInvalidArgument
    })
}

fn store<T>(out: *mut *mut T, value: T) -> GfStatus {
    if out.is_null() {
        set_error("null output pointer");
        return GfStatus::GfNullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    GfStatus::GfOk
}

macro_rules! deref_or_return {
    ($handle:expr) => {{
        if $handle.is_null() {
            set_error("null handle");
            return GfStatus::GfNullPointer;
        }
        unsafe { &(*$handle).0 }
    }};
}

/// Message of the most recent failure on the calling thread. Never null;
/// empty before the first failure. Valid until the next failing call on
/// this thread.
#[no_mangle]
pub extern "C" fn gf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Loads a built-in grid by name: "one_node", "three_node", or
/// "three_node_two_batteries".
///
/// # Safety
/// `name` must be a valid nul-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_grid_preset(name: *const c_char, out: *mut *mut GfGrid) -> GfStatus {
    guarded(|| {
        let name = match cstr_arg(name) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match preset_grid(name) {
            Ok(spec) => store(out, GfGrid(spec)),
            Err(err) => fail(err),
        }
    })
}

/// Loads and validates a grid definition from a JSON file.
///
/// # Safety
/// `path` must be a valid nul-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_grid_from_json_file(
    path: *const c_char,
    out: *mut *mut GfGrid,
) -> GfStatus {
    guarded(|| {
        let path = match cstr_arg(path) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match GridSpec::from_json_file(Path::new(path)) {
            Ok(spec) => store(out, GfGrid(spec)),
            Err(err) => fail(err),
        }
    })
}

/// Writes the node, generator, wind-farm, and battery counts of a grid.
///
/// # Safety
/// `grid` must be a live handle; the out pointers must be valid or null
/// (null outputs are skipped).
#[no_mangle]
pub unsafe extern "C" fn gf_grid_counts(
    grid: *const GfGrid,
    n_nodes: *mut usize,
    n_generators: *mut usize,
    n_farms: *mut usize,
    n_batteries: *mut usize,
) -> GfStatus {
    guarded(|| {
        let spec = deref_or_return!(grid);
        if !n_nodes.is_null() {
            *n_nodes = spec.n_t();
        }
        if !n_generators.is_null() {
            *n_generators = spec.n_g();
        }
        if !n_farms.is_null() {
            *n_farms = spec.n_f();
        }
        if !n_batteries.is_null() {
            *n_batteries = spec.n_s();
        }
        GfStatus::GfOk
    })
}

/// Releases a grid handle. Null is a no-op.
///
/// # Safety
/// `grid` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn gf_grid_free(grid: *mut GfGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Loads and validates a wind-error chain from a JSON file.
///
/// # Safety
/// `path` must be a valid nul-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_dtmc_from_json_file(
    path: *const c_char,
    out: *mut *mut GfDtmc,
) -> GfStatus {
    guarded(|| {
        let path = match cstr_arg(path) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match WindDtmc::from_json_file(Path::new(path)) {
            Ok(dtmc) => store(out, GfDtmc(dtmc)),
            Err(err) => fail(err),
        }
    })
}

/// Estimates a wind-error chain from a history CSV
/// (timestamp,forecast_mw,actual_mw) with `bins` uniform error bins.
///
/// # Safety
/// `path` must be a valid nul-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_dtmc_estimate_csv(
    path: *const c_char,
    bins: usize,
    out: *mut *mut GfDtmc,
) -> GfStatus {
    guarded(|| {
        let path = match cstr_arg(path) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let result = ErrorSeries::from_csv(Path::new(path))
            .and_then(|series| estimate_dtmc(&series, bins));
        match result {
            Ok(dtmc) => store(out, GfDtmc(dtmc)),
            Err(err) => fail(err),
        }
    })
}

/// Writes the number of chain states.
///
/// # Safety
/// `dtmc` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_dtmc_n_states(dtmc: *const GfDtmc, out: *mut usize) -> GfStatus {
    guarded(|| {
        let dtmc = deref_or_return!(dtmc);
        if out.is_null() {
            set_error("null output pointer");
            return GfStatus::GfNullPointer;
        }
        *out = dtmc.n_states();
        GfStatus::GfOk
    })
}

/// Writes the mean self-transition probability of the chain.
///
/// # Safety
/// `dtmc` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_dtmc_diagonal_dominance(
    dtmc: *const GfDtmc,
    out: *mut f64,
) -> GfStatus {
    guarded(|| {
        let dtmc = deref_or_return!(dtmc);
        if out.is_null() {
            set_error("null output pointer");
            return GfStatus::GfNullPointer;
        }
        *out = dtmc.diagonal_dominance();
        GfStatus::GfOk
    })
}

/// Saves the chain as JSON.
///
/// # Safety
/// `dtmc` must be a live handle; `path` a valid nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gf_dtmc_save_json(dtmc: *const GfDtmc, path: *const c_char) -> GfStatus {
    guarded(|| {
        let dtmc = deref_or_return!(dtmc);
        let path = match cstr_arg(path) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match dtmc.to_json_file(Path::new(path)) {
            Ok(()) => GfStatus::GfOk,
            Err(err) => fail(err),
        }
    })
}

/// Releases a chain handle. Null is a no-op.
///
/// # Safety
/// `dtmc` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn gf_dtmc_free(dtmc: *mut GfDtmc) {
    if !dtmc.is_null() {
        drop(Box::from_raw(dtmc));
    }
}

/// Loads a scenario config JSON and resolves it into a runnable scenario.
/// Relative paths inside the config resolve against its directory.
///
/// # Safety
/// `config_path` must be a valid nul-terminated string; `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_scenario_load(
    config_path: *const c_char,
    out: *mut *mut GfScenario,
) -> GfStatus {
    guarded(|| {
        let path = match cstr_arg(config_path) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let path = PathBuf::from(path);
        let base_dir = path.parent().map(PathBuf::from).unwrap_or_default();
        let result =
            ScenarioConfig::from_json_file(&path).and_then(|config| config.build(&base_dir));
        match result {
            Ok(scenario) => store(out, GfScenario(scenario)),
            Err(err) => fail(err),
        }
    })
}

/// Releases a scenario handle. Null is a no-op.
///
/// # Safety
/// `scenario` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn gf_scenario_free(scenario: *mut GfScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs one seeded closed-loop trajectory. `out_failed` receives 1 when
/// the run hit a constraint violation or ran out of feasible actions, and
/// `out_j_hz_h` the deviation integral of the completed part.
///
/// # Safety
/// `scenario` must be a live handle; out pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn gf_run_once(
    scenario: *const GfScenario,
    seed: u64,
    out_j_hz_h: *mut f64,
    out_failed: *mut u8,
) -> GfStatus {
    guarded(|| {
        let scenario = deref_or_return!(scenario);
        match run_once(scenario, seed) {
            Ok(record) => {
                if !out_j_hz_h.is_null() {
                    *out_j_hz_h = record.j_hz_h;
                }
                if !out_failed.is_null() {
                    *out_failed = record.failed() as u8;
                }
                GfStatus::GfOk
            }
            Err(err) => fail(err),
        }
    })
}

/// Runs `n_runs` trajectories with seeds `base_seed .. base_seed +
/// n_runs` and writes the aggregate summary.
///
/// # Safety
/// `scenario` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_run_campaign(
    scenario: *const GfScenario,
    base_seed: u64,
    n_runs: usize,
    out: *mut GfCampaignSummary,
) -> GfStatus {
    guarded(|| {
        let scenario = deref_or_return!(scenario);
        if out.is_null() {
            set_error("null output pointer");
            return GfStatus::GfNullPointer;
        }
        match run_campaign(scenario, base_seed, n_runs) {
            Ok(campaign) => {
                let (has_aggregate, mean, ci) = match &campaign.aggregate {
                    Some(agg) => (1, agg.mean_j_hz_h, agg.ci95_half_width),
                    None => (0, f64::NAN, f64::NAN),
                };
                *out = GfCampaignSummary {
                    n_runs: campaign.n_runs,
                    n_failed: campaign.n_failed,
                    failure_rate: campaign.failure_rate,
                    has_aggregate,
                    mean_j_hz_h: mean,
                    ci95_half_width: ci,
                    mean_solve_time_s: campaign.mean_solve_time_s,
                };
                GfStatus::GfOk
            }
            Err(err) => fail(err),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn preset_round_trip_reports_counts() {
        let name = c("three_node");
        let mut grid: *mut GfGrid = ptr::null_mut();
        let status = unsafe { gf_grid_preset(name.as_ptr(), &mut grid) };
        assert_eq!(status, GfStatus::GfOk);
        let (mut n_t, mut n_g, mut n_f, mut n_s) = (0usize, 0usize, 0usize, 0usize);
        let status =
            unsafe { gf_grid_counts(grid, &mut n_t, &mut n_g, &mut n_f, &mut n_s) };
        assert_eq!(status, GfStatus::GfOk);
        assert_eq!((n_t, n_g, n_f, n_s), (3, 1, 1, 1));
        unsafe { gf_grid_free(grid) };
    }

    #[test]
    fn unknown_preset_sets_error_message() {
        let name = c("no_such_grid");
        let mut grid: *mut GfGrid = ptr::null_mut();
        let status = unsafe { gf_grid_preset(name.as_ptr(), &mut grid) };
        assert_eq!(status, GfStatus::GfInvalidArgument);
        let message = unsafe { CStr::from_ptr(gf_last_error_message()) };
        assert!(message.to_str().unwrap().contains("no_such_grid"));
    }

    #[test]
    fn null_arguments_are_rejected_not_crashed() {
        let mut grid: *mut GfGrid = ptr::null_mut();
        assert_eq!(
            unsafe { gf_grid_preset(ptr::null(), &mut grid) },
            GfStatus::GfNullPointer
        );
        let name = c("one_node");
        assert_eq!(
            unsafe { gf_grid_preset(name.as_ptr(), ptr::null_mut()) },
            GfStatus::GfNullPointer
        );
        assert_eq!(
            unsafe { gf_grid_counts(ptr::null(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) },
            GfStatus::GfNullPointer
        );
        unsafe {
            gf_grid_free(ptr::null_mut());
            gf_dtmc_free(ptr::null_mut());
            gf_scenario_free(ptr::null_mut());
        }
    }

    #[test]
    fn missing_grid_file_maps_to_io_status() {
        let path = c("/nonexistent/grid.json");
        let mut grid: *mut GfGrid = ptr::null_mut();
        let status = unsafe { gf_grid_from_json_file(path.as_ptr(), &mut grid) };
        assert_eq!(status, GfStatus::GfIo);
    }

    #[test]
    fn estimate_and_query_dtmc_through_the_abi() {
        let dir = std::env::temp_dir().join("gridflex_ffi_estimate_test");
        std::fs::create_dir_all(&dir).unwrap();
        let csv_path = dir.join("history.csv");
        let series =
            gridflex::wind::synth::ar1_series(2000, 300.0, 0.8, 0.5, 5.0, 7);
        series.to_csv(&csv_path).unwrap();

        let path = c(csv_path.to_str().unwrap());
        let mut dtmc: *mut GfDtmc = ptr::null_mut();
        let status = unsafe { gf_dtmc_estimate_csv(path.as_ptr(), 11, &mut dtmc) };
        assert_eq!(status, GfStatus::GfOk);

        let mut n_states = 0usize;
        assert_eq!(unsafe { gf_dtmc_n_states(dtmc, &mut n_states) }, GfStatus::GfOk);
        assert_eq!(n_states, 11);
        let mut dominance = 0.0f64;
        assert_eq!(
            unsafe { gf_dtmc_diagonal_dominance(dtmc, &mut dominance) },
            GfStatus::GfOk
        );
        assert!((0.0..=1.0).contains(&dominance));

        let json_path = dir.join("chain.json");
        let json_c = c(json_path.to_str().unwrap());
        assert_eq!(unsafe { gf_dtmc_save_json(dtmc, json_c.as_ptr()) }, GfStatus::GfOk);
        unsafe { gf_dtmc_free(dtmc) };

        let mut reloaded: *mut GfDtmc = ptr::null_mut();
        assert_eq!(
            unsafe { gf_dtmc_from_json_file(json_c.as_ptr(), &mut reloaded) },
            GfStatus::GfOk
        );
        unsafe { gf_dtmc_free(reloaded) };
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn scenario_runs_end_to_end_through_the_abi() {
        let dir = std::env::temp_dir().join("gridflex_ffi_run_test");
        std::fs::create_dir_all(&dir).unwrap();
        let config_path = dir.join("scenario.json");
        std::fs::write(
            &config_path,
            r#"{
                "grid": {"preset": "one_node"},
                "dtmc": {"zero_noise": true},
                "lambda": 3,
                "horizon_steps": 1,
                "control_steps": 3,
                "load": {"base": 2.0},
                "wind_forecast": 1.0
            }"#,
        )
        .unwrap();

        let path = c(config_path.to_str().unwrap());
        let mut scenario: *mut GfScenario = ptr::null_mut();
        let status = unsafe { gf_scenario_load(path.as_ptr(), &mut scenario) };
        assert_eq!(status, GfStatus::GfOk);

        let mut j = f64::NAN;
        let mut failed = 2u8;
        assert_eq!(
            unsafe { gf_run_once(scenario, 0, &mut j, &mut failed) },
            GfStatus::GfOk
        );
        assert!(j.is_finite());
        assert_eq!(failed, 0);

        let mut summary = GfCampaignSummary {
            n_runs: 0,
            n_failed: 0,
            failure_rate: 0.0,
            has_aggregate: 0,
            mean_j_hz_h: 0.0,
            ci95_half_width: 0.0,
            mean_solve_time_s: 0.0,
        };
        assert_eq!(
            unsafe { gf_run_campaign(scenario, 0, 2, &mut summary) },
            GfStatus::GfOk
        );
        assert_eq!(summary.n_runs, 2);
        assert_eq!(summary.has_aggregate, 1);
        assert!(summary.mean_j_hz_h.is_finite());
        unsafe { gf_scenario_free(scenario) };
        std::fs::remove_dir_all(&dir).ok();
    }
}
