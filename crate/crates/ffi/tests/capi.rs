use std::f64::consts::{FRAC_2_PI, PI};
use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use parajc_ffi::*;

fn system(detuning: f64, parametric: f64, n_max: usize) -> *mut ParajcSystem {
    let mut sys = ptr::null_mut();
    let status = unsafe { parajc_system_new(detuning, 1.0, parametric, 0.0, 0.0, n_max, &mut sys) };
    assert_eq!(status, ParajcStatus::Ok);
    assert!(!sys.is_null());
    sys
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { parajc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(parajc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn uncoupled_eigenvalues_follow_the_dressed_ladder() {
    let sys = system(1.3, 0.0, 4);
    let dim = unsafe { parajc_system_dim(sys) };
    assert_eq!(dim, 10);

    let mut len = 0;
    let mut short = vec![0.0; 3];
    let status =
        unsafe { parajc_system_eigenvalues(sys, short.as_mut_ptr(), short.len(), &mut len) };
    assert_eq!(status, ParajcStatus::BufferTooSmall);
    assert_eq!(len, dim);

    let mut values = vec![0.0; len];
    let status =
        unsafe { parajc_system_eigenvalues(sys, values.as_mut_ptr(), values.len(), &mut len) };
    assert_eq!(status, ParajcStatus::Ok);
    let mut expected = vec![0.0, 1.3 * 5.0];
    for n in 1..=4 {
        let k = n as f64;
        expected.push(1.3 * k + k.sqrt());
        expected.push(1.3 * k - k.sqrt());
    }
    expected.sort_by(f64::total_cmp);
    for (a, b) in values.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
    unsafe { parajc_system_free(sys) };
}

#[test]
fn crossing_i_is_found_through_the_c_api() {
    let sys = system(0.0, 0.1, 10);
    let (mut delta, mut gap) = (0.0, 0.0);
    let status = unsafe { parajc_locate_crossing(sys, 1, &mut delta, &mut gap) };
    assert_eq!(status, ParajcStatus::Ok);
    assert!((delta - 1.3865).abs() < 1e-3, "Δ* = {delta}");
    assert!((gap - 0.1020).abs() < 1e-3, "gap = {gap}");

    let status = unsafe { parajc_locate_crossing(sys, 7, &mut delta, &mut gap) };
    assert_eq!(status, ParajcStatus::InvalidParameter);
    assert!(last_error().contains("1 or 2"));
    unsafe { parajc_system_free(sys) };
}

#[test]
fn evolution_and_beats() {
    let sys = system(1.386_536_6, 0.1, 10);
    let mut series = ptr::null_mut();
    let status = unsafe { parajc_evolve(sys, 100.0, 0.02, 0.02, &mut series) };
    assert_eq!(status, ParajcStatus::Ok);
    let n = unsafe { parajc_series_len(series) };
    assert_eq!(n, 5001);

    let mut pe = vec![0.0; n];
    let mut len = 0;
    let status = unsafe { parajc_series_excited_population(series, pe.as_mut_ptr(), n, &mut len) };
    assert_eq!(status, ParajcStatus::Ok);
    assert!((pe[0] - 1.0).abs() < 1e-12);
    assert!(pe.iter().all(|p| (-1e-12..=1.0 + 1e-12).contains(p)));

    let mut beats = ParajcBeats {
        fast_period: 0.0,
        slow_period: 0.0,
        quiet_time: 0.0,
        quiet_excited_population: 0.0,
        contrast: 0.0,
    };
    assert_eq!(
        unsafe { parajc_series_beats(series, &mut beats) },
        ParajcStatus::Ok
    );
    assert!((beats.fast_period - PI).abs() < 0.05 * PI);
    assert!((beats.slow_period - 60.7).abs() < 3.0);
    assert!((beats.quiet_time - 31.0).abs() < 2.0);
    unsafe {
        parajc_series_free(series);
        parajc_system_free(sys);
    }
}

#[test]
fn short_series_reports_its_error() {
    let sys = system(1.386_536_6, 0.1, 6);
    let mut series = ptr::null_mut();
    assert_eq!(
        unsafe { parajc_evolve(sys, 2.0, 0.02, 0.02, &mut series) },
        ParajcStatus::Ok
    );
    let mut beats = std::mem::MaybeUninit::<ParajcBeats>::uninit();
    let status = unsafe { parajc_series_beats(series, beats.as_mut_ptr()) };
    assert_eq!(status, ParajcStatus::SeriesTooShort);
    assert!(last_error().contains("too short"));
    unsafe {
        parajc_series_free(series);
        parajc_system_free(sys);
    }
}

#[test]
fn invalid_arguments_map_to_status_codes() {
    let mut sys = ptr::null_mut();
    let status = unsafe { parajc_system_new(1.0, 1.0, 0.1, -1.0, 0.0, 5, &mut sys) };
    assert_eq!(status, ParajcStatus::InvalidParameter);
    assert!(sys.is_null());
    let status = unsafe { parajc_system_new(1.0, 1.0, 0.1, 0.0, 0.0, 0, &mut sys) };
    assert_ne!(status, ParajcStatus::Ok);
    let status = unsafe { parajc_system_new(1.0, 1.0, 0.1, 0.0, 0.0, 5, ptr::null_mut()) };
    assert_eq!(status, ParajcStatus::NullPointer);
    assert_eq!(unsafe { parajc_system_dim(ptr::null()) }, 0);
    unsafe { parajc_system_free(ptr::null_mut()) };

    let ok = system(1.0, 0.1, 3);
    assert_eq!(
        unsafe { parajc_system_eigenvalues(ok, ptr::null_mut(), 8, ptr::null_mut()) },
        ParajcStatus::NullPointer
    );
    let mut values = [0.0; 8];
    assert_eq!(
        unsafe { parajc_system_eigenvalues(ok, values.as_mut_ptr(), 8, ptr::null_mut()) },
        ParajcStatus::Ok
    );
    unsafe { parajc_system_free(ok) };
    let mut buf = [0 as std::ffi::c_char; 8];
    assert_eq!(
        unsafe { parajc_last_error_message(buf.as_mut_ptr(), 8) },
        0,
        "a successful call clears the error"
    );
}

#[test]
fn wigner_target_and_numeric_agree() {
    let (half, step) = (3.0, 0.1);
    let side = 61;
    let mut analytic = vec![0.0; side * side];
    let mut len = 0;
    let status = unsafe {
        parajc_wigner_target(
            ParajcTarget::Odd,
            half,
            step,
            analytic.as_mut_ptr(),
            analytic.len(),
            &mut len,
        )
    };
    assert_eq!(status, ParajcStatus::Ok);
    assert_eq!(len, side * side);
    let origin = (side / 2) * side + side / 2;
    assert!((analytic[origin] + FRAC_2_PI).abs() < 1e-14);

    // |odd⟩ = (|1⟩ + i|3⟩)/√2 on eight levels.
    let dim = 8;
    let (mut re, mut im) = (vec![0.0; dim * dim], vec![0.0; dim * dim]);
    re[dim + 1] = 0.5;
    re[3 * dim + 3] = 0.5;
    im[dim + 3] = -0.5;
    im[3 * dim + 1] = 0.5;
    let mut numeric = vec![0.0; side * side];
    let status = unsafe {
        parajc_wigner_density(
            re.as_ptr(),
            im.as_ptr(),
            dim,
            half,
            step,
            numeric.as_mut_ptr(),
            numeric.len(),
            &mut len,
        )
    };
    assert_eq!(status, ParajcStatus::Ok);
    let worst = analytic
        .iter()
        .zip(&numeric)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-10, "sup difference {worst}");

    let status = unsafe {
        parajc_wigner_target(ParajcTarget::Even, half, -1.0, ptr::null_mut(), 0, &mut len)
    };
    assert_eq!(status, ParajcStatus::InvalidParameter);
}

#[test]
fn concurrence_of_bell_and_product_states() {
    let mut c = 0.0;
    let mut bell = [0.0; 16];
    for (r, col) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        bell[r * 4 + col] = 0.5;
    }
    let zeros = [0.0; 16];
    assert_eq!(
        unsafe { parajc_concurrence(bell.as_ptr(), zeros.as_ptr(), &mut c) },
        ParajcStatus::Ok
    );
    assert!((c - 1.0).abs() < 1e-10);

    let mut product = [0.0; 16];
    product[0] = 1.0;
    assert_eq!(
        unsafe { parajc_concurrence(product.as_ptr(), zeros.as_ptr(), &mut c) },
        ParajcStatus::Ok
    );
    assert!(c.abs() < 1e-10);
}

#[test]
fn generated_header_declares_the_api() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/parajc.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for symbol in [
        "parajc_system_new",
        "parajc_system_free",
        "parajc_evolve",
        "parajc_series_beats",
        "parajc_wigner_density",
        "parajc_concurrence",
        "PARAJC_STATUS_SERIES_TOO_SHORT = 6",
        "typedef struct ParajcSystem ParajcSystem;",
    ] {
        assert!(text.contains(symbol), "header lacks {symbol}");
    }
}

#[test]
fn generated_header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/parajc.h");
    let Ok(out) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(&header)
        .output()
    else {
        eprintln!("no C compiler on PATH; header syntax check skipped");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
