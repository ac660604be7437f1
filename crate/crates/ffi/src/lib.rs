//! C ABI over `mdlhist`.
//!
//! Histograms are opaque handles created by `mdlh_fit*` and released with
//! `mdlh_histogram_free`. Every fallible call returns an `MdlhStatus`; on
//! failure `mdlh_last_error_message` describes the error for the calling
//! thread. Panics never cross the boundary, they come back as
//! `MDLH_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use mdlhist::criteria::{log_star, nml_parametric_complexity};
use mdlhist::eval::{hellinger, HistogramDensity, ReferenceDensity};
use mdlhist::{fit, Criterion, Dataset, Error, FitResult, FitSpec, Resolution, Solver};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdlhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    BudgetExceeded = 4,
    Panic = 5,
}

pub const MDLH_METHOD_ENUM: u32 = 0;
pub const MDLH_METHOD_NML: u32 = 1;
pub const MDLH_METHOD_GENUM: u32 = 2;

pub const MDLH_SOLVER_GREEDY: u32 = 0;
pub const MDLH_SOLVER_DP: u32 = 1;

/// A fitted histogram.
pub struct MdlhHistogram {
    fit: FitResult,
    edges: Vec<f64>,
    densities: Vec<f64>,
}

impl MdlhHistogram {
    fn new(fit: FitResult) -> Self {
        let density = HistogramDensity::from_model(&fit.model, &fit.grid);
        Self {
            edges: density.edges().to_vec(),
            densities: density.densities().to_vec(),
            fit,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let msg = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> MdlhStatus {
    match err.exit_code() {
        4 => MdlhStatus::BudgetExceeded,
        3 => MdlhStatus::DataError,
        _ => MdlhStatus::InvalidArgument,
    }
}

/// Runs `f`, turning errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), MdlhStatus>) -> MdlhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MdlhStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {what}"));
            MdlhStatus::Panic
        }
    }
}

fn fail(err: Error) -> MdlhStatus {
    set_error(err.to_string());
    status_of(&err)
}

fn null(what: &str) -> MdlhStatus {
    set_error(format!("{what} is null"));
    MdlhStatus::NullPointer
}

unsafe fn dataset(values: *const f64, len: usize) -> Result<Dataset, MdlhStatus> {
    if values.is_null() {
        return Err(null("values"));
    }
    // SAFETY: the caller guarantees `len` readable doubles at `values`
    let data = unsafe { slice::from_raw_parts(values, len) };
    Dataset::new(data.to_vec()).map_err(fail)
}

unsafe fn store(out: *mut *mut MdlhHistogram, fit: FitResult) {
    // SAFETY: checked non-null by the caller
    unsafe { *out = Box::into_raw(Box::new(MdlhHistogram::new(fit))) };
}

/// Fits a G-Enum histogram to `len` values.
///
/// # Safety
/// `values` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdlh_fit_genum(values: *const f64, len: usize, out: *mut *mut MdlhHistogram) -> MdlhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d = unsafe { dataset(values, len) }?;
        let f = fit(&d, &FitSpec::genum()).map_err(fail)?;
        unsafe { store(out, f) };
        Ok(())
    })
}

/// Fits with an explicit method (`MDLH_METHOD_*`) and solver (`MDLH_SOLVER_*`).
/// Enum and NML need exactly one of `epsilon > 0` or `grid_bins > 0`; pass
/// 0 for the other. G-Enum ignores both.
///
/// # Safety
/// `values` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdlh_fit(
    values: *const f64,
    len: usize,
    method: u32,
    epsilon: f64,
    grid_bins: u64,
    solver: u32,
    out: *mut *mut MdlhHistogram,
) -> MdlhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let solver = match solver {
            MDLH_SOLVER_GREEDY => Solver::Greedy,
            MDLH_SOLVER_DP => Solver::Dp,
            other => return Err(fail(Error::InvalidArgument(format!("unknown solver {other}")))),
        };
        let criterion = match method {
            MDLH_METHOD_ENUM => Some(Criterion::Enum),
            MDLH_METHOD_NML => Some(Criterion::Nml),
            MDLH_METHOD_GENUM => None,
            other => return Err(fail(Error::InvalidArgument(format!("unknown method {other}")))),
        };
        let spec = match criterion {
            None => FitSpec { solver, ..FitSpec::genum() },
            Some(c) => {
                let resolution = match (epsilon > 0.0, grid_bins > 0) {
                    (true, false) => Resolution::Epsilon(epsilon),
                    (false, true) => Resolution::Bins(grid_bins),
                    _ => {
                        return Err(fail(Error::InvalidArgument(
                            "exactly one of epsilon and grid_bins must be positive".into(),
                        )))
                    }
                };
                FitSpec::fixed(c, resolution, solver)
            }
        };
        let d = unsafe { dataset(values, len) }?;
        let f = fit(&d, &spec).map_err(fail)?;
        unsafe { store(out, f) };
        Ok(())
    })
}

/// Releases a histogram. Null is a no-op.
///
/// # Safety
/// `h` must come from `mdlh_fit*` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mdlh_histogram_free(h: *mut MdlhHistogram) {
    if !h.is_null() {
        // SAFETY: created by Box::into_raw in `store`
        drop(unsafe { Box::from_raw(h) });
    }
}

unsafe fn handle<'a>(h: *const MdlhHistogram) -> Option<&'a MdlhHistogram> {
    // SAFETY: the caller passes a live handle or null
    unsafe { h.as_ref() }
}

/// Number of intervals, 0 for a null handle.
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mdlh_histogram_k(h: *const MdlhHistogram) -> usize {
    unsafe { handle(h) }.map_or(0, |h| h.fit.model.k())
}

/// Number of observations, 0 for a null handle.
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mdlh_histogram_n(h: *const MdlhHistogram) -> u64 {
    unsafe { handle(h) }.map_or(0, |h| h.fit.model.n())
}

/// Criterion value in nats, NaN for a null handle.
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mdlh_histogram_cost(h: *const MdlhHistogram) -> f64 {
    unsafe { handle(h) }.map_or(f64::NAN, |h| h.fit.cost.total)
}

/// Selected granularity for G-Enum fits, 0 otherwise.
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mdlh_histogram_granularity(h: *const MdlhHistogram) -> u64 {
    unsafe { handle(h) }.and_then(|h| h.fit.granularity).unwrap_or(0)
}

/// Density of the histogram at `x`, NaN for a null handle.
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mdlh_histogram_density_at(h: *const MdlhHistogram, x: f64) -> f64 {
    unsafe { handle(h) }.map_or(f64::NAN, |h| h.fit.density_at(x))
}

unsafe fn copy_out<T: Copy>(src: &[T], out: *mut T, capacity: usize) -> Result<(), MdlhStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    if capacity < src.len() {
        return Err(fail(Error::InvalidArgument(format!(
            "buffer holds {capacity} values, {} needed",
            src.len()
        ))));
    }
    // SAFETY: `out` has room for `capacity >= src.len()` values
    unsafe { ptr::copy_nonoverlapping(src.as_ptr(), out, src.len()) };
    Ok(())
}

/// Copies the K + 1 interval edges into `out`.
///
/// # Safety
/// `h` must be a live handle; `out` must have room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn mdlh_histogram_edges(h: *const MdlhHistogram, out: *mut f64, capacity: usize) -> MdlhStatus {
    guard(|| {
        let h = unsafe { handle(h) }.ok_or_else(|| null("histogram"))?;
        unsafe { copy_out(&h.edges, out, capacity) }
    })
}

/// Copies the K interval densities into `out`.
///
/// # Safety
/// `h` must be a live handle; `out` must have room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn mdlh_histogram_densities(
    h: *const MdlhHistogram,
    out: *mut f64,
    capacity: usize,
) -> MdlhStatus {
    guard(|| {
        let h = unsafe { handle(h) }.ok_or_else(|| null("histogram"))?;
        unsafe { copy_out(&h.densities, out, capacity) }
    })
}

/// Copies the K interval counts into `out`.
///
/// # Safety
/// `h` must be a live handle; `out` must have room for `capacity` integers.
#[no_mangle]
pub unsafe extern "C" fn mdlh_histogram_counts(h: *const MdlhHistogram, out: *mut u64, capacity: usize) -> MdlhStatus {
    guard(|| {
        let h = unsafe { handle(h) }.ok_or_else(|| null("histogram"))?;
        unsafe { copy_out(h.fit.model.counts(), out, capacity) }
    })
}

/// Hellinger distance between a named reference density and the histogram.
///
/// # Safety
/// `h` must be a live handle, `name` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mdlh_hellinger_reference(
    h: *const MdlhHistogram,
    name: *const c_char,
    out: *mut f64,
) -> MdlhStatus {
    guard(|| {
        let h = unsafe { handle(h) }.ok_or_else(|| null("histogram"))?;
        if name.is_null() {
            return Err(null("name"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: NUL-terminated per the contract
        let name = unsafe { CStr::from_ptr(name) }
            .to_str()
            .map_err(|_| fail(Error::InvalidArgument("density name is not UTF-8".into())))?;
        let p: ReferenceDensity = name.parse().map_err(fail)?;
        let q = HistogramDensity::new(h.edges.clone(), h.densities.clone()).map_err(fail)?;
        let d = hellinger(&p, &q).map_err(fail)?;
        unsafe { *out = d };
        Ok(())
    })
}

/// Universal integer code length `log*(k)` in nats.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdlh_log_star(k: u64, out: *mut f64) -> MdlhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let v = log_star(k).map_err(fail)?;
        unsafe { *out = v };
        Ok(())
    })
}

/// NML parametric complexity `ln R(n, K)` in nats.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdlh_nml_parametric_complexity(n: u64, k: u64, out: *mut f64) -> MdlhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if k == 0 {
            return Err(fail(Error::InvalidArgument("K must be at least 1".into())));
        }
        let v = nml_parametric_complexity(n, k as usize);
        unsafe { *out = v };
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mdlh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mdlh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
