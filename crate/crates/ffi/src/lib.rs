//! C interface to `swvar`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` /
//! producer functions and released with the matching `*_free`. Every
//! fallible call returns a [`SwvarStatus`]; on failure the message is kept
//! per thread and can be read with [`swvar_last_error_message`].
//! Matrices are passed as row-major `double` buffers.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swvar::dependence::{dependence_factor, solve_lyapunov, LinearProcessSpec};
use swvar::penalties::PenaltySpec;
use swvar::pipeline::{fit_var, LambdaRule};
use swvar::simulate::{simulate_var, NoiseSpec, SimOptions};
use swvar::solvers::{FitResult, SolverConfig};
use swvar::{Error, Matrix, Trajectory, VarModel};

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwvarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Structural = 3,
    InsufficientData = 4,
    Unstable = 5,
    Numerical = 6,
    BufferTooSmall = 7,
    Io = 8,
    Panic = 9,
}

/// VAR(d) model.
pub struct SwvarModel(VarModel);

/// Simulated or user-supplied trajectory of T+1 observations.
pub struct SwvarTrajectory(Trajectory);

/// Estimated stacked coefficient matrix with solver diagnostics.
pub struct SwvarFit(FitResult);

/// Dependence summary of a VAR model.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SwvarDependenceReport {
    pub c_factor: f64,
    pub rho: f64,
    pub op_norm: f64,
    pub truncation_terms: usize,
    pub tail_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut e = e.borrow_mut();
        e.clear();
        e.extend_from_slice(msg.as_bytes());
    });
}

fn status_of(err: &Error) -> SwvarStatus {
    match err {
        Error::Structural(_) => SwvarStatus::Structural,
        Error::InsufficientData { .. } => SwvarStatus::InsufficientData,
        Error::Instability { .. } => SwvarStatus::Unstable,
        Error::Truncation { .. } | Error::Numerical(_) => SwvarStatus::Numerical,
        Error::Io(_) | Error::Csv(_) => SwvarStatus::Io,
        Error::Parameter(_) | Error::Config(_) | Error::Json(_) => SwvarStatus::InvalidArgument,
    }
}

struct Fail(SwvarStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SwvarStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SwvarStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SwvarStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            SwvarStatus::Panic
        }
    }
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn write_matrix(m: &Matrix, out: *mut f64, len: usize) -> Result<(), Fail> {
    let need = m.nrows() * m.ncols();
    if len < need {
        return Err(Fail(
            SwvarStatus::BufferTooSmall,
            format!("buffer holds {len} values, {need} needed"),
        ));
    }
    if need > 0 && out.is_null() {
        return Err(null("output buffer"));
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            *out.add(i * m.ncols() + j) = m[(i, j)];
        }
    }
    Ok(())
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn square(p: usize, values: &[f64]) -> Matrix {
    Matrix::from_row_slice(p, p, values)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn swvar_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message (NUL-terminated,
/// truncated to `len`) and returns the full message length in bytes.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn swvar_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = e.len().min(len - 1);
            ptr::copy_nonoverlapping(e.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Builds a VAR(d) model from `d` row-major p×p blocks `B_1..B_d`
/// (`coeffs` holds `d·p·p` values).
///
/// # Safety
/// `coeffs` must point to `d·p·p` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn swvar_model_new(
    p: usize,
    d: usize,
    coeffs: *const f64,
    out: *mut *mut SwvarModel,
) -> SwvarStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if p == 0 || d == 0 {
            return Err(Fail(SwvarStatus::InvalidArgument, "p and d must be positive".into()));
        }
        let values = slice(coeffs, d * p * p, "coeffs")?;
        let blocks = values.chunks(p * p).map(|c| square(p, c)).collect();
        *out = Box::into_raw(Box::new(SwvarModel(VarModel::new(blocks)?)));
        Ok(())
    })
}

/// # Safety
/// `model` must come from `swvar_model_new` (or be null) and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn swvar_model_free(model: *mut SwvarModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn swvar_model_dims(model: *const SwvarModel, p: *mut usize, d: *mut usize) -> SwvarStatus {
    guard(|| {
        let m = &handle(model, "model")?.0;
        *out_ptr(p, "p")? = m.p();
        *out_ptr(d, "d")? = m.d();
        Ok(())
    })
}

/// Spectral radius of the companion matrix.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn swvar_model_spectral_radius(model: *const SwvarModel, out: *mut f64) -> SwvarStatus {
    guard(|| {
        let m = &handle(model, "model")?.0;
        *out_ptr(out, "out")? = m.spectral_radius()?;
        Ok(())
    })
}

/// Writes the dp×dp companion matrix (row-major) into `out`.
///
/// # Safety
/// `out` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn swvar_model_companion(model: *const SwvarModel, out: *mut f64, len: usize) -> SwvarStatus {
    guard(|| {
        let m = &handle(model, "model")?.0;
        write_matrix(&m.companion(), out, len)
    })
}

/// Dependence factor of the model driven by noise covariance `sigma`
/// (p×p row-major; null means identity).
///
/// # Safety
/// `sigma` must hold p·p doubles when non-null; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn swvar_dependence_factor(
    model: *const SwvarModel,
    sigma: *const f64,
    out: *mut SwvarDependenceReport,
) -> SwvarStatus {
    guard(|| {
        let m = &handle(model, "model")?.0;
        let out = out_ptr(out, "out")?;
        let p = m.p();
        let sigma = if sigma.is_null() {
            Matrix::identity(p, p)
        } else {
            square(p, slice(sigma, p * p, "sigma")?)
        };
        let r = dependence_factor(&LinearProcessSpec::from_var(m, &sigma)?)?;
        *out = SwvarDependenceReport {
            c_factor: r.c_factor,
            rho: r.rho,
            op_norm: r.op_norm,
            truncation_terms: r.truncation_terms,
            tail_bound: r.tail_bound,
        };
        Ok(())
    })
}

/// Stationary covariance `Σ = BᵀΣB + Σ_η` of a VAR(1) with transition `b`.
///
/// # Safety
/// `b`, `sigma_eta` and `out` must each hold p·p doubles.
#[no_mangle]
pub unsafe extern "C" fn swvar_solve_lyapunov(
    p: usize,
    b: *const f64,
    sigma_eta: *const f64,
    out: *mut f64,
) -> SwvarStatus {
    guard(|| {
        if p == 0 {
            return Err(Fail(SwvarStatus::InvalidArgument, "p must be positive".into()));
        }
        let b = square(p, slice(b, p * p, "b")?);
        let s = square(p, slice(sigma_eta, p * p, "sigma_eta")?);
        write_matrix(&solve_lyapunov(&b, &s)?, out, p * p)
    })
}

/// Simulates `horizon + 1` observations with Subweibull(`gamma2`) noise of
/// standard deviation `scale` after `burn_in` discarded steps.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn swvar_simulate(
    model: *const SwvarModel,
    gamma2: f64,
    scale: f64,
    horizon: usize,
    burn_in: usize,
    seed: u64,
    out: *mut *mut SwvarTrajectory,
) -> SwvarStatus {
    guard(|| {
        let m = &handle(model, "model")?.0;
        let out = out_ptr(out, "out")?;
        let noise = NoiseSpec::new(gamma2, scale, m.p())?;
        let opts = SimOptions {
            burn_in,
            allow_unstable: false,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let traj = simulate_var(m, &noise, horizon, &opts, &mut rng)?;
        *out = Box::into_raw(Box::new(SwvarTrajectory(traj)));
        Ok(())
    })
}

/// Wraps a row-major `rows × p` data buffer as a trajectory.
///
/// # Safety
/// `data` must hold rows·p doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn swvar_trajectory_new(
    rows: usize,
    p: usize,
    data: *const f64,
    out: *mut *mut SwvarTrajectory,
) -> SwvarStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let values = slice(data, rows * p, "data")?;
        let traj = Trajectory::new(Matrix::from_row_slice(rows, p, values))?;
        *out = Box::into_raw(Box::new(SwvarTrajectory(traj)));
        Ok(())
    })
}

/// # Safety
/// `traj` must come from this library (or be null) and not be reused.
#[no_mangle]
pub unsafe extern "C" fn swvar_trajectory_free(traj: *mut SwvarTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn swvar_trajectory_dims(
    traj: *const SwvarTrajectory,
    rows: *mut usize,
    p: *mut usize,
) -> SwvarStatus {
    guard(|| {
        let t = &handle(traj, "traj")?.0;
        *out_ptr(rows, "rows")? = t.data().nrows();
        *out_ptr(p, "p")? = t.p();
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn swvar_trajectory_copy(
    traj: *const SwvarTrajectory,
    out: *mut f64,
    len: usize,
) -> SwvarStatus {
    guard(|| write_matrix(handle(traj, "traj")?.0.data(), out, len))
}

/// ℓ1-penalized VAR(d) fit at a fixed λ.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn swvar_fit_lasso(
    traj: *const SwvarTrajectory,
    d: usize,
    lambda: f64,
    out: *mut *mut SwvarFit,
) -> SwvarStatus {
    guard(|| {
        let t = &handle(traj, "traj")?.0;
        let out = out_ptr(out, "out")?;
        let fit = fit_var(
            t,
            d,
            &PenaltySpec::L1,
            &LambdaRule::Fixed { lambda },
            &SolverConfig::default(),
        )?;
        *out = Box::into_raw(Box::new(SwvarFit(fit.without_trace())));
        Ok(())
    })
}

/// # Safety
/// `fit` must come from this library (or be null) and not be reused.
#[no_mangle]
pub unsafe extern "C" fn swvar_fit_free(fit: *mut SwvarFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Shape of the stacked coefficient matrix (`dp × p`).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn swvar_fit_dims(fit: *const SwvarFit, rows: *mut usize, cols: *mut usize) -> SwvarStatus {
    guard(|| {
        let f = &handle(fit, "fit")?.0;
        *out_ptr(rows, "rows")? = f.coeffs.nrows();
        *out_ptr(cols, "cols")? = f.coeffs.ncols();
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn swvar_fit_coeffs(fit: *const SwvarFit, out: *mut f64, len: usize) -> SwvarStatus {
    guard(|| write_matrix(&handle(fit, "fit")?.0.coeffs, out, len))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn swvar_fit_info(
    fit: *const SwvarFit,
    iters: *mut usize,
    converged: *mut bool,
) -> SwvarStatus {
    guard(|| {
        let f = &handle(fit, "fit")?.0;
        *out_ptr(iters, "iters")? = f.iters;
        *out_ptr(converged, "converged")? = f.converged;
        Ok(())
    })
}

/// Reads a message previously returned by [`swvar_last_error_message`]
/// back as a Rust string; test helper.
#[doc(hidden)]
pub fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    unsafe {
        swvar_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}
