use std::ffi::CStr;
use std::ptr;

use rollqv_ffi::*;

fn series(horizon: f64, values: &[f64]) -> *mut RqvSeries {
    let mut out = ptr::null_mut();
    let st = unsafe {
        rqv_series_new(
            horizon,
            values.len() - 1,
            values.as_ptr(),
            values.len(),
            &mut out,
        )
    };
    assert_eq!(st, RqvStatus::Ok);
    out
}

fn last_error() -> String {
    let p = rqv_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn rolling_qv_of_a_spike() {
    let mut v = vec![0.0; 11];
    v[5] = 1.0;
    let s = series(1.0, &v);
    let mut qv = 0.0;
    assert_eq!(unsafe { rqv_rolling_qv(s, s, 2, &mut qv) }, RqvStatus::Ok);
    assert_eq!(qv, 3.0);
    assert_eq!(unsafe { rqv_series_len(s) }, 11);
    let mut back = [0.0; 11];
    assert_eq!(
        unsafe { rqv_series_values(s, back.as_mut_ptr(), back.len()) },
        11
    );
    assert_eq!(back.to_vec(), v);
    unsafe { rqv_series_free(s) };
}

#[test]
fn tsqc_rho_and_beta_agree_with_the_library() {
    // twice-cumulated pseudo-noise has a positive two-scale diagonal
    let noise: Vec<f64> = (0..=40).map(|i| ((i * i) as f64 * 0.37).sin()).collect();
    let walk: Vec<f64> = noise
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let a: Vec<f64> = walk
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let b: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(i, x)| 2.0 * x + 0.1 * i as f64)
        .collect();
    let (sa, sb) = (series(1.0, &a), series(1.0, &b));
    let (mut cross, mut rho, mut beta, mut clamped) = (0.0, 0.0, 0.0, -1);
    unsafe {
        assert_eq!(rqv_tsqc(sa, sb, 3, 2, &mut cross), RqvStatus::Ok);
        assert_eq!(rqv_beta(sb, sa, 3, 2, &mut beta), RqvStatus::Ok);
        assert_eq!(rqv_rho(sa, sb, 3, 2, &mut rho, &mut clamped), RqvStatus::Ok);
    }
    // b is 2a plus a line, which the second difference removes
    assert!((beta - 2.0).abs() < 1e-9);
    assert!((rho - 1.0).abs() < 1e-12);
    assert!(clamped == 0 || clamped == 1);
    let grid = rollqv::timegrid::BlockGrid::new(1.0, 40).unwrap();
    let la = rollqv::BlockSeries::new(grid, a).unwrap();
    let lb = rollqv::BlockSeries::new(grid, b).unwrap();
    let want = rollqv::estimators::tsqc(&la, &lb, rollqv::TsqcConfig::new(3, 2).unwrap()).unwrap();
    assert_eq!(cross, want);
    unsafe {
        rqv_series_free(sa);
        rqv_series_free(sb);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let v = [0.0, 1.0, 2.0];
    let mut out = ptr::null_mut();
    let st = unsafe { rqv_series_new(1.0, 5, v.as_ptr(), v.len(), &mut out) };
    assert_eq!(st, RqvStatus::InvalidArgument);
    assert!(out.is_null());
    assert!(last_error().contains("block series needs 6 values"));

    let st = unsafe { rqv_series_new(1.0, 2, ptr::null(), 3, &mut out) };
    assert_eq!(st, RqvStatus::NullPointer);
    assert!(last_error().contains("values"));

    let flat = series(1.0, &[1.0; 9]);
    let mut r = 0.0;
    let st = unsafe { rqv_rho(flat, flat, 1, 2, &mut r, ptr::null_mut()) };
    assert_eq!(st, RqvStatus::UndefinedEstimate);
    let mut qv = 0.0;
    assert_eq!(
        unsafe { rqv_rolling_qv(flat, ptr::null(), 1, &mut qv) },
        RqvStatus::NullPointer
    );
    unsafe { rqv_series_free(flat) };
    unsafe { rqv_series_free(ptr::null_mut()) };
}

#[test]
fn tick_handles_build_series() {
    let n = 4000;
    let times: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
    let prices: Vec<f64> = (0..n)
        .map(|i| 0.01 * ((i * 7919 % 101) as f64 - 50.0) / 50.0)
        .collect();
    let mut ticks = ptr::null_mut();
    assert_eq!(
        unsafe { rqv_ticks_new(times.as_ptr(), prices.as_ptr(), n, &mut ticks) },
        RqvStatus::Ok
    );
    let (mut vol, mut count) = (ptr::null_mut(), ptr::null_mut());
    let mut sparse = usize::MAX;
    unsafe {
        assert_eq!(
            rqv_integrated_vol(ticks, 1.0, 20, 0, 2, 1, &mut vol, &mut sparse),
            RqvStatus::Ok
        );
        assert_eq!(
            rqv_cumulative_count(ticks, 1.0, 20, 1e-3, &mut count),
            RqvStatus::Ok
        );
    }
    assert_eq!(sparse, 0);
    let mut last = [0.0; 21];
    unsafe { rqv_series_values(count, last.as_mut_ptr(), 21) };
    assert!((last[20] - 4.0).abs() < 1e-12);

    let mut tv = 0.0;
    assert_eq!(
        unsafe { rqv_tsrv(prices.as_ptr(), n, 2, 1, &mut tv) },
        RqvStatus::Ok
    );
    assert_eq!(tv, rollqv::estimators::tsrv(&prices, 2, 1).unwrap());

    let bad = [0.5, 0.2];
    let mut t2 = ptr::null_mut();
    assert_eq!(
        unsafe { rqv_ticks_new(bad.as_ptr(), bad.as_ptr(), 2, &mut t2) },
        RqvStatus::InvalidArgument
    );
    unsafe {
        rqv_series_free(vol);
        rqv_series_free(count);
        rqv_ticks_free(ticks);
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/rollqv.h");
    for name in [
        "rqv_last_error",
        "rqv_series_new",
        "rqv_series_free",
        "rqv_series_len",
        "rqv_series_values",
        "rqv_ticks_new",
        "rqv_ticks_free",
        "rqv_integrated_vol",
        "rqv_cumulative_count",
        "rqv_rolling_qv",
        "rqv_tsqc",
        "rqv_rho",
        "rqv_beta",
        "rqv_tsrv",
    ] {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    assert!(header.contains("RQV_STATUS_UNDEFINED_ESTIMATE = 3"));
}
