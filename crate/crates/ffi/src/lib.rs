//! C ABI over the `rollqv` estimators.
//!
//! Series and tick data live behind opaque handles that the caller frees.
//! Every fallible call returns an [`RqvStatus`]; on failure the message is
//! available from [`rqv_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rollqv::estimators::{self, BlockSeries, TsqcConfig};
use rollqv::timegrid::BlockGrid;
use rollqv::{Error, TickSeries};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RqvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UndefinedEstimate = 3,
    Format = 4,
    EmptyInput = 5,
    Io = 6,
    Panic = 7,
}

/// Cumulative process sampled on a block grid.
pub struct RqvSeries(BlockSeries);

/// Strictly increasing tick times with prices.
pub struct RqvTicks(TickSeries);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(err: &Error) -> RqvStatus {
    match err {
        Error::InvalidArgument(_) => RqvStatus::InvalidArgument,
        Error::UndefinedEstimate { .. } => RqvStatus::UndefinedEstimate,
        Error::Format(_) | Error::Csv(_) | Error::Config(_) => RqvStatus::Format,
        Error::EmptyInput(_) => RqvStatus::EmptyInput,
        Error::Io(_) => RqvStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> RqvStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => RqvStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            RqvStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            RqvStatus::Panic
        }
    }
}

unsafe fn slice<'a>(
    data: *const f64,
    len: usize,
    what: &'static str,
) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rqv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Build a series from `blocks + 1` values at the boundaries of a uniform
/// grid on `[0, horizon]`.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rqv_series_new(
    horizon: f64,
    blocks: usize,
    values: *const f64,
    len: usize,
    out: *mut *mut RqvSeries,
) -> RqvStatus {
    guard(|| {
        let values = slice(values, len, "values")?.to_vec();
        let series = BlockSeries::new(BlockGrid::new(horizon, blocks)?, values)?;
        write(out, Box::into_raw(Box::new(RqvSeries(series))), "out")
    })
}

/// # Safety
/// `series` must come from this library and not be freed twice. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn rqv_series_free(series: *mut RqvSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of values (`blocks + 1`) held by the series.
///
/// # Safety
/// `series` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn rqv_series_len(series: *const RqvSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.values().len())
}

/// Copy up to `cap` values into `buf`; returns the number copied.
///
/// # Safety
/// `series` must be a live handle; `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn rqv_series_values(
    series: *const RqvSeries,
    buf: *mut f64,
    cap: usize,
) -> usize {
    let Some(s) = series.as_ref() else { return 0 };
    if buf.is_null() {
        return 0;
    }
    let n = cap.min(s.0.values().len());
    ptr::copy_nonoverlapping(s.0.values().as_ptr(), buf, n);
    n
}

/// # Safety
/// `times` and `prices` must each point to `len` readable doubles; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn rqv_ticks_new(
    times: *const f64,
    prices: *const f64,
    len: usize,
    out: *mut *mut RqvTicks,
) -> RqvStatus {
    guard(|| {
        let t = slice(times, len, "times")?.to_vec();
        let p = slice(prices, len, "prices")?.to_vec();
        let ticks = TickSeries::new(t, p)?;
        write(out, Box::into_raw(Box::new(RqvTicks(ticks))), "out")
    })
}

/// # Safety
/// `ticks` must come from this library and not be freed twice. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn rqv_ticks_free(ticks: *mut RqvTicks) {
    if !ticks.is_null() {
        drop(Box::from_raw(ticks));
    }
}

/// Integrated-variance series: block-local TSRV on pre-averaged prices,
/// cumulated. `preavg = 0` picks `⌈√(ticks per block)⌉`. The number of
/// blocks too sparse to estimate is written to `sparse` when non-NULL.
///
/// # Safety
/// `ticks` must be a live handle; `out` writable; `sparse` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn rqv_integrated_vol(
    ticks: *const RqvTicks,
    horizon: f64,
    blocks: usize,
    preavg: usize,
    tsrv_k: usize,
    tsrv_j: usize,
    out: *mut *mut RqvSeries,
    sparse: *mut usize,
) -> RqvStatus {
    guard(|| {
        let ticks = &deref(ticks, "ticks")?.0;
        let grid = BlockGrid::new(horizon, blocks)?;
        let m = if preavg == 0 {
            estimators::default_preaverage_window(ticks.len(), blocks)
        } else {
            preavg
        };
        let (series, n_sparse) =
            estimators::integrated_vol_series(ticks, &grid, m, tsrv_k, tsrv_j)?;
        if !sparse.is_null() {
            sparse.write(n_sparse);
        }
        write(out, Box::into_raw(Box::new(RqvSeries(series))), "out")
    })
}

/// `scale` times the number of ticks at or before each boundary.
///
/// # Safety
/// `ticks` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rqv_cumulative_count(
    ticks: *const RqvTicks,
    horizon: f64,
    blocks: usize,
    scale: f64,
    out: *mut *mut RqvSeries,
) -> RqvStatus {
    guard(|| {
        let ticks = &deref(ticks, "ticks")?.0;
        let grid = BlockGrid::new(horizon, blocks)?;
        let series = estimators::cumulative_count(ticks.times(), &grid, scale)?;
        write(out, Box::into_raw(Box::new(RqvSeries(series))), "out")
    })
}

/// Unscaled rolling QV at half-window `k`.
///
/// # Safety
/// `a`, `b` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rqv_rolling_qv(
    a: *const RqvSeries,
    b: *const RqvSeries,
    k: usize,
    out: *mut f64,
) -> RqvStatus {
    guard(|| {
        let v = estimators::rolling_qv(&deref(a, "a")?.0, &deref(b, "b")?.0, k)?;
        write(out, v, "out")
    })
}

/// # Safety
/// `a`, `b` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rqv_tsqc(
    a: *const RqvSeries,
    b: *const RqvSeries,
    k1: usize,
    gamma_ratio: usize,
    out: *mut f64,
) -> RqvStatus {
    guard(|| {
        let cfg = TsqcConfig::new(k1, gamma_ratio)?;
        let v = estimators::tsqc(&deref(a, "a")?.0, &deref(b, "b")?.0, cfg)?;
        write(out, v, "out")
    })
}

/// Two-scale correlation, clamped into `[-1, 1]`. `clamped` (optional)
/// receives 1 when clamping happened.
///
/// # Safety
/// `a`, `b` must be live handles; `out` writable; `clamped` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn rqv_rho(
    a: *const RqvSeries,
    b: *const RqvSeries,
    k1: usize,
    gamma_ratio: usize,
    out: *mut f64,
    clamped: *mut i32,
) -> RqvStatus {
    guard(|| {
        let cfg = TsqcConfig::new(k1, gamma_ratio)?;
        let r = estimators::rho_tsqc(&deref(a, "a")?.0, &deref(b, "b")?.0, cfg)?;
        if !clamped.is_null() {
            clamped.write(r.clamped as i32);
        }
        write(out, r.value, "out")
    })
}

/// # Safety
/// `a`, `b` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rqv_beta(
    a: *const RqvSeries,
    b: *const RqvSeries,
    k1: usize,
    gamma_ratio: usize,
    out: *mut f64,
) -> RqvStatus {
    guard(|| {
        let cfg = TsqcConfig::new(k1, gamma_ratio)?;
        let v = estimators::beta_tsqc(&deref(a, "a")?.0, &deref(b, "b")?.0, cfg)?;
        write(out, v, "out")
    })
}

/// Two-scales realized variance of a price sequence.
///
/// # Safety
/// `prices` must point to `len` readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rqv_tsrv(
    prices: *const f64,
    len: usize,
    k: usize,
    j: usize,
    out: *mut f64,
) -> RqvStatus {
    guard(|| {
        let v = estimators::tsrv(slice(prices, len, "prices")?, k, j)?;
        write(out, v, "out")
    })
}
