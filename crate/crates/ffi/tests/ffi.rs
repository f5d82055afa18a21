use std::ffi::CStr;
use std::ptr;

use swvar_ffi::*;

fn var1(b: &[f64], p: usize) -> *mut SwvarModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { swvar_model_new(p, 1, b.as_ptr(), &mut m) }, SwvarStatus::Ok);
    m
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(swvar_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn model_round_trip_and_radius() {
    let m = var1(&[0.5, 0.0, 0.0, 0.25], 2);
    let (mut p, mut d) = (0, 0);
    unsafe {
        assert_eq!(swvar_model_dims(m, &mut p, &mut d), SwvarStatus::Ok);
        assert_eq!((p, d), (2, 1));
        let mut rho = 0.0;
        assert_eq!(swvar_model_spectral_radius(m, &mut rho), SwvarStatus::Ok);
        assert!((rho - 0.5).abs() < 1e-12);
        let mut comp = [0.0; 4];
        assert_eq!(swvar_model_companion(m, comp.as_mut_ptr(), 4), SwvarStatus::Ok);
        assert_eq!(comp, [0.5, 0.0, 0.0, 0.25]);
        let mut small = [0.0; 3];
        assert_eq!(
            swvar_model_companion(m, small.as_mut_ptr(), 3),
            SwvarStatus::BufferTooSmall
        );
        swvar_model_free(m);
    }
}

#[test]
fn dependence_of_scaled_identity() {
    let m = var1(&[0.5, 0.0, 0.0, 0.5], 2);
    let mut rep = SwvarDependenceReport::default();
    unsafe {
        assert_eq!(swvar_dependence_factor(m, ptr::null(), &mut rep), SwvarStatus::Ok);
        swvar_model_free(m);
    }
    let direct = swvar::dependence::dependence_factor(
        &swvar::dependence::LinearProcessSpec::var1(
            swvar::Matrix::identity(2, 2) * 0.5,
            swvar::Matrix::identity(2, 2),
        )
        .unwrap(),
    )
    .unwrap();
    assert_eq!(rep.c_factor, direct.c_factor);
    assert!((rep.rho - 0.5).abs() < 1e-12);
}

#[test]
fn lyapunov_residual() {
    let b = [0.3, 0.1, -0.2, 0.4];
    let s = [1.0, 0.2, 0.2, 2.0];
    let mut out = [0.0; 4];
    assert_eq!(
        unsafe { swvar_solve_lyapunov(2, b.as_ptr(), s.as_ptr(), out.as_mut_ptr()) },
        SwvarStatus::Ok
    );
    let bm = swvar::Matrix::from_row_slice(2, 2, &b);
    let sm = swvar::Matrix::from_row_slice(2, 2, &s);
    let x = swvar::Matrix::from_row_slice(2, 2, &out);
    let resid = &x - bm.transpose() * &x * &bm - sm;
    assert!(resid.amax() < 1e-10);
}

#[test]
fn unstable_model_reports_status_and_message() {
    let m = var1(&[1.2], 1);
    let mut t = ptr::null_mut();
    let status = unsafe { swvar_simulate(m, 2.0, 1.0, 50, 10, 1, &mut t) };
    assert_eq!(status, SwvarStatus::Unstable);
    assert!(t.is_null());
    assert!(last_error().contains("unstable"));
    let mut needed = unsafe { swvar_last_error_message(ptr::null_mut(), 0) };
    assert!(needed > 0);
    unsafe {
        assert_eq!(swvar_model_spectral_radius(m, &mut 0.0), SwvarStatus::Ok);
        needed = swvar_last_error_message(ptr::null_mut(), 0);
        swvar_model_free(m);
    }
    assert_eq!(needed, 0);
}

#[test]
fn null_handles_are_rejected() {
    let mut rho = 0.0;
    assert_eq!(
        unsafe { swvar_model_spectral_radius(ptr::null(), &mut rho) },
        SwvarStatus::NullPointer
    );
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { swvar_model_new(2, 1, ptr::null(), &mut m) },
        SwvarStatus::NullPointer
    );
    assert_eq!(
        unsafe { swvar_model_new(2, 1, [1.0, 0.0, 0.0, 1.0].as_ptr(), &mut m) },
        SwvarStatus::Ok
    );
    unsafe {
        swvar_model_free(m);
        swvar_model_free(ptr::null_mut());
        swvar_trajectory_free(ptr::null_mut());
        swvar_fit_free(ptr::null_mut());
    }
}

#[test]
fn simulate_then_fit() {
    let m = var1(&[0.5, 0.0, 0.2, 0.3], 2);
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(swvar_simulate(m, 2.0, 1.0, 400, 100, 9, &mut t), SwvarStatus::Ok);
        let (mut rows, mut p) = (0, 0);
        swvar_trajectory_dims(t, &mut rows, &mut p);
        assert_eq!((rows, p), (401, 2));
        let mut data = vec![0.0; rows * p];
        assert_eq!(swvar_trajectory_copy(t, data.as_mut_ptr(), data.len()), SwvarStatus::Ok);

        // Same seed, same path.
        let mut t2 = ptr::null_mut();
        swvar_simulate(m, 2.0, 1.0, 400, 100, 9, &mut t2);
        let mut data2 = vec![0.0; rows * p];
        swvar_trajectory_copy(t2, data2.as_mut_ptr(), data2.len());
        assert_eq!(data, data2);

        let mut fit = ptr::null_mut();
        assert_eq!(swvar_fit_lasso(t, 1, 1e-3, &mut fit), SwvarStatus::Ok);
        let (mut r, mut c) = (0, 0);
        swvar_fit_dims(fit, &mut r, &mut c);
        assert_eq!((r, c), (2, 2));
        let mut coef = [0.0; 4];
        swvar_fit_coeffs(fit, coef.as_mut_ptr(), 4);
        let truth = [0.5, 0.0, 0.2, 0.3];
        for (a, b) in coef.iter().zip(truth) {
            assert!((a - b).abs() < 0.15, "{coef:?}");
        }
        let (mut iters, mut conv) = (0, false);
        swvar_fit_info(fit, &mut iters, &mut conv);
        assert!(conv && iters > 0);

        let mut own = ptr::null_mut();
        assert_eq!(swvar_trajectory_new(rows, p, data.as_ptr(), &mut own), SwvarStatus::Ok);

        swvar_fit_free(fit);
        swvar_trajectory_free(own);
        swvar_trajectory_free(t2);
        swvar_trajectory_free(t);
        swvar_model_free(m);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/swvar.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let mut count = 0;
    for line in src.lines() {
        if let Some(rest) = line.split("extern \"C\" fn ").nth(1) {
            let name = rest.split('(').next().unwrap();
            assert!(header.contains(&format!("{name}(")), "{name} missing from header");
            count += 1;
        }
    }
    assert!(count >= 15);
    assert!(header.contains("SWVAR_STATUS_UNSTABLE = 5"));
}
