//! C ABI over the fou crate.
//!
//! Conventions:
//!
//! * Every fallible call returns a [`FouStatus`]; `FOU_STATUS_OK` is 0.
//!   On failure a textual description is stored per thread and can be
//!   read with [`fou_last_error_message`].
//! * Ensembles are opaque heap handles created by the `*_sample`
//!   constructors and released with [`fou_ensemble_free`]. Handles are
//!   immutable after creation, so sharing one across reader threads is
//!   safe; create and free them on whichever thread is convenient.
//! * Scalar evaluators write through `out` pointers and leave them
//!   untouched on failure. Quadrature-backed evaluators use the
//!   library's default tolerance profile and optionally report their
//!   error bound.
//! * Panics never unwind across the boundary; they are caught and
//!   reported as `FOU_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fou::analytics::{
    doob_cov, doob_decay_rate, doob_variance, driver_var, fou1_cov_asymptotic,
    fou1_stationary_variance, fou2_cov, fou2_decay_rate, ou_cov, weak_limit_constants,
    KernelSpec, QuadConfig,
};
use fou::transforms::{
    doob_transform, driver_process, fou1_path, fou2_path, Fou1Init, Fou2Method, PathConfig,
};
use fou::types::TruncationPolicy;
use fou::{Ensemble, FouError, ModelParams, TimeGrid};

/// Result of every fallible call in this ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FouStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter failed validation (range or finiteness).
    InvalidParameter = 2,
    /// Arguments outside the mathematical domain of the quantity.
    Domain = 3,
    /// Structurally invalid usage (bad index, wrong buffer length).
    Usage = 4,
    /// A numerical routine failed (factorization, non-finite result).
    Numerical = 5,
    /// Adaptive quadrature stopped before reaching its tolerance.
    NoConvergence = 6,
    Config = 7,
    Io = 8,
    /// An internal panic was caught at the boundary.
    Panic = 9,
}

/// Model parameter triple. `gamma` is only read by the second-kind
/// functions; pass 1.0 when it is irrelevant.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FouParams {
    pub hurst: f64,
    pub alpha: f64,
    pub gamma: f64,
}

/// Initial condition for first-kind paths.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FouFirstKindInit {
    /// Stationary start from the truncated history integral; pair with
    /// a truncation tolerance.
    Stationary = 0,
    /// Start at zero (transient path).
    Zero = 1,
}

/// Construction route for second-kind paths.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FouSecondKindMethod {
    /// Extract the short-memory driver, then solve the Langevin
    /// recursion on it.
    LangevinOnY = 0,
    /// Evaluate the closed integral form against the underlying
    /// fractional Brownian motion.
    DirectTransform = 1,
}

/// Opaque ensemble of sampled paths on a shared grid.
pub struct FouEnsemble {
    inner: Ensemble,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let owned = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = owned);
}

fn status_of(err: &FouError) -> FouStatus {
    match err {
        FouError::InvalidParameter { .. } => FouStatus::InvalidParameter,
        FouError::Domain(_) => FouStatus::Domain,
        FouError::Usage(_) => FouStatus::Usage,
        FouError::Numerical(_) => FouStatus::Numerical,
        FouError::QuadratureNoConvergence { .. } => FouStatus::NoConvergence,
        FouError::Config(_) => FouStatus::Config,
        FouError::Io(_) => FouStatus::Io,
    }
}

fn fail(err: FouError) -> FouStatus {
    set_last_error(&err.to_string());
    status_of(&err)
}

fn null_arg(name: &str) -> FouStatus {
    set_last_error(&format!("{name} must not be null"));
    FouStatus::NullPointer
}

/// Runs the body with a panic guard; panics become `Panic` status.
fn guarded(f: impl FnOnce() -> FouStatus) -> FouStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic caught at the C boundary");
            FouStatus::Panic
        }
    }
}

fn to_model(params: FouParams) -> fou::Result<ModelParams> {
    ModelParams::new(params.hurst, params.alpha, params.gamma)
}

fn to_usize(name: &str, v: u64) -> fou::Result<usize> {
    usize::try_from(v).map_err(|_| FouError::Usage(format!("{name} = {v} does not fit in usize")))
}

/// Writes a scalar through `out` if the computation succeeded.
unsafe fn deliver_f64(out: *mut f64, r: fou::Result<f64>) -> FouStatus {
    if out.is_null() {
        return null_arg("out");
    }
    match r {
        Ok(v) => {
            *out = v;
            FouStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Writes `(value, error bound)`; `err_out` may be null.
unsafe fn deliver_quad(
    out: *mut f64,
    err_out: *mut f64,
    r: fou::Result<(f64, f64)>,
) -> FouStatus {
    if out.is_null() {
        return null_arg("out");
    }
    match r {
        Ok((v, e)) => {
            *out = v;
            if !err_out.is_null() {
                *err_out = e;
            }
            FouStatus::Ok
        }
        Err(e) => fail(e),
    }
}

unsafe fn deliver_ensemble(
    out: *mut *mut FouEnsemble,
    r: fou::Result<Ensemble>,
) -> FouStatus {
    if out.is_null() {
        return null_arg("out");
    }
    match r {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(FouEnsemble { inner }));
            FouStatus::Ok
        }
        Err(e) => fail(e),
    }
}

unsafe fn ensemble_ref<'a>(handle: *const FouEnsemble) -> Option<&'a Ensemble> {
    handle.as_ref().map(|h| &h.inner)
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fou_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Description of the most recent failure on the calling thread, empty
/// if none. The pointer stays valid until the next failing call on the
/// same thread.
#[no_mangle]
pub extern "C" fn fou_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Samples fractional Brownian motion exactly (Cholesky of the target
/// covariance) on the uniform grid of `steps` intervals over
/// [0, t_max]. The handle must be released with `fou_ensemble_free`.
#[no_mangle]
pub unsafe extern "C" fn fou_fbm_sample(
    hurst: f64,
    t_max: f64,
    steps: u64,
    seed: u64,
    count: u64,
    out: *mut *mut FouEnsemble,
) -> FouStatus {
    guarded(|| {
        deliver_ensemble(out, (|| {
            let grid = TimeGrid::uniform(t_max, to_usize("steps", steps)?)?;
            fou::fbm::sample_fbm_cholesky(hurst, &grid, seed, to_usize("count", count)?)
        })())
    })
}

/// Samples the damped time-changed transform of fractional Brownian
/// motion (stationary for every Hurst index) on the uniform grid.
#[no_mangle]
pub unsafe extern "C" fn fou_doob_sample(
    params: FouParams,
    t_max: f64,
    steps: u64,
    seed: u64,
    count: u64,
    out: *mut *mut FouEnsemble,
) -> FouStatus {
    guarded(|| {
        deliver_ensemble(out, (|| {
            let grid = TimeGrid::uniform(t_max, to_usize("steps", steps)?)?;
            doob_transform(&to_model(params)?, &grid, seed, to_usize("count", count)?)
        })())
    })
}

/// Samples the short-memory driver extracted from the damped
/// transform. `refinement` subdivides each grid interval for the
/// internal quadrature (8 is the library default).
#[no_mangle]
pub unsafe extern "C" fn fou_driver_sample(
    params: FouParams,
    t_max: f64,
    steps: u64,
    refinement: u64,
    seed: u64,
    count: u64,
    out: *mut *mut FouEnsemble,
) -> FouStatus {
    guarded(|| {
        deliver_ensemble(out, (|| {
            let grid = TimeGrid::uniform(t_max, to_usize("steps", steps)?)?;
            let config = PathConfig { refinement: to_usize("refinement", refinement)? };
            driver_process(&to_model(params)?, &grid, seed, to_usize("count", count)?, &config)
        })())
    })
}

/// Samples first-kind paths (Langevin driven by fractional Brownian
/// motion). `trunc_tol` bounds the mass discarded when truncating the
/// stationary history integral; it is ignored for the zero start.
#[no_mangle]
pub unsafe extern "C" fn fou_fou1_sample(
    params: FouParams,
    t_max: f64,
    steps: u64,
    refinement: u64,
    seed: u64,
    count: u64,
    init: FouFirstKindInit,
    trunc_tol: f64,
    out: *mut *mut FouEnsemble,
) -> FouStatus {
    guarded(|| {
        deliver_ensemble(out, (|| {
            let grid = TimeGrid::uniform(t_max, to_usize("steps", steps)?)?;
            let config = PathConfig { refinement: to_usize("refinement", refinement)? };
            let init = match init {
                FouFirstKindInit::Zero => Fou1Init::Zero,
                FouFirstKindInit::Stationary => {
                    Fou1Init::StationaryTruncated(TruncationPolicy::auto(trunc_tol)?)
                }
            };
            fou1_path(
                &to_model(params)?,
                &grid,
                seed,
                to_usize("count", count)?,
                &init,
                &config,
            )
        })())
    })
}

/// Samples second-kind paths by either construction route. Requires
/// 1/2 < H < 1. `trunc_tol` bounds the discarded stationary history.
#[no_mangle]
pub unsafe extern "C" fn fou_fou2_sample(
    params: FouParams,
    t_max: f64,
    steps: u64,
    refinement: u64,
    seed: u64,
    count: u64,
    method: FouSecondKindMethod,
    trunc_tol: f64,
    out: *mut *mut FouEnsemble,
) -> FouStatus {
    guarded(|| {
        deliver_ensemble(out, (|| {
            let grid = TimeGrid::uniform(t_max, to_usize("steps", steps)?)?;
            let config = PathConfig { refinement: to_usize("refinement", refinement)? };
            let method = match method {
                FouSecondKindMethod::LangevinOnY => Fou2Method::LangevinOnY,
                FouSecondKindMethod::DirectTransform => Fou2Method::DirectTransform,
            };
            fou2_path(
                &to_model(params)?,
                &grid,
                seed,
                to_usize("count", count)?,
                method,
                &TruncationPolicy::auto(trunc_tol)?,
                &config,
            )
        })())
    })
}

/// Releases an ensemble handle; null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn fou_ensemble_free(handle: *mut FouEnsemble) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of paths in the ensemble, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn fou_ensemble_num_paths(handle: *const FouEnsemble) -> u64 {
    ensemble_ref(handle).map_or(0, |e| e.n_paths() as u64)
}

/// Number of grid points per path, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn fou_ensemble_num_times(handle: *const FouEnsemble) -> u64 {
    ensemble_ref(handle).map_or(0, |e| e.n_times() as u64)
}

/// Grid time at the given index.
#[no_mangle]
pub unsafe extern "C" fn fou_ensemble_time(
    handle: *const FouEnsemble,
    idx: u64,
    out: *mut f64,
) -> FouStatus {
    guarded(|| {
        let Some(ens) = ensemble_ref(handle) else {
            return null_arg("handle");
        };
        let times = ens.grid.times();
        deliver_f64(out, match times.get(idx as usize) {
            Some(&t) => Ok(t),
            None => Err(FouError::Usage(format!(
                "time index {idx} out of range for {} grid points",
                times.len()
            ))),
        })
    })
}

/// Single path value by (path, time index).
#[no_mangle]
pub unsafe extern "C" fn fou_ensemble_value(
    handle: *const FouEnsemble,
    path: u64,
    idx: u64,
    out: *mut f64,
) -> FouStatus {
    guarded(|| {
        let Some(ens) = ensemble_ref(handle) else {
            return null_arg("handle");
        };
        let (np, nt) = (ens.n_paths() as u64, ens.n_times() as u64);
        deliver_f64(out, if path < np && idx < nt {
            Ok(ens.value(path as usize, idx as usize))
        } else {
            Err(FouError::Usage(format!(
                "index ({path}, {idx}) out of range for {np} paths x {nt} times"
            )))
        })
    })
}

/// Copies one path into `buffer`, which must hold exactly
/// `fou_ensemble_num_times` doubles.
#[no_mangle]
pub unsafe extern "C" fn fou_ensemble_copy_path(
    handle: *const FouEnsemble,
    path: u64,
    buffer: *mut f64,
    len: u64,
) -> FouStatus {
    guarded(|| {
        let Some(ens) = ensemble_ref(handle) else {
            return null_arg("handle");
        };
        if buffer.is_null() {
            return null_arg("buffer");
        }
        let (np, nt) = (ens.n_paths() as u64, ens.n_times() as u64);
        if path >= np {
            return fail(FouError::Usage(format!(
                "path {path} out of range for {np} paths"
            )));
        }
        if len != nt {
            return fail(FouError::Usage(format!(
                "buffer length {len} does not match {nt} grid points"
            )));
        }
        let src = ens.path(path as usize);
        std::ptr::copy_nonoverlapping(src.as_ptr(), buffer, src.len());
        FouStatus::Ok
    })
}

/// Classical Ornstein-Uhlenbeck stationary covariance
/// e^{-alpha |t - s|} / (2 alpha).
#[no_mangle]
pub unsafe extern "C" fn fou_ou_cov(alpha: f64, s: f64, t: f64, out: *mut f64) -> FouStatus {
    guarded(|| deliver_f64(out, ou_cov(alpha, s, t)))
}

/// Stationary covariance of the damped time-changed transform.
#[no_mangle]
pub unsafe extern "C" fn fou_doob_cov(
    params: FouParams,
    s: f64,
    t: f64,
    out: *mut f64,
) -> FouStatus {
    guarded(|| deliver_f64(out, to_model(params).and_then(|p| doob_cov(&p, s, t))))
}

/// Stationary variance (H / alpha)^{2H} of the damped transform.
#[no_mangle]
pub unsafe extern "C" fn fou_doob_variance(params: FouParams, out: *mut f64) -> FouStatus {
    guarded(|| deliver_f64(out, to_model(params).and_then(|p| doob_variance(&p))))
}

/// Exponential decay rate alpha min(1, (1 - H) / H) of the damped
/// transform's covariance.
#[no_mangle]
pub unsafe extern "C" fn fou_doob_decay_rate(params: FouParams, out: *mut f64) -> FouStatus {
    guarded(|| deliver_f64(out, to_model(params).and_then(|p| doob_decay_rate(&p))))
}

/// Exponential decay rate min(gamma, (1 - H) / H) of the second-kind
/// covariance.
#[no_mangle]
pub unsafe extern "C" fn fou_fou2_decay_rate(params: FouParams, out: *mut f64) -> FouStatus {
    guarded(|| deliver_f64(out, to_model(params).and_then(|p| fou2_decay_rate(&p))))
}

/// Large-lag expansion of the first-kind stationary covariance with
/// the given number of terms (H != 1/2).
#[no_mangle]
pub unsafe extern "C" fn fou_fou1_cov_asymptotic(
    params: FouParams,
    lag: f64,
    terms: u64,
    out: *mut f64,
) -> FouStatus {
    guarded(|| {
        deliver_f64(
            out,
            (|| fou1_cov_asymptotic(&to_model(params)?, lag, to_usize("terms", terms)?))(),
        )
    })
}

/// Stationary variance of the first-kind process by quadrature.
/// `err_out` (nullable) receives the quadrature error bound.
#[no_mangle]
pub unsafe extern "C" fn fou_fou1_stationary_variance(
    params: FouParams,
    out: *mut f64,
    err_out: *mut f64,
) -> FouStatus {
    guarded(|| {
        deliver_quad(out, err_out, (|| {
            let r = fou1_stationary_variance(&to_model(params)?, &QuadConfig::default())?;
            Ok((r.value, r.error))
        })())
    })
}

/// Variance of the driver at time t by quadrature. `err_out`
/// (nullable) receives the quadrature error bound.
#[no_mangle]
pub unsafe extern "C" fn fou_driver_var(
    params: FouParams,
    t: f64,
    out: *mut f64,
    err_out: *mut f64,
) -> FouStatus {
    guarded(|| {
        deliver_quad(out, err_out, (|| {
            let r = driver_var(&to_model(params)?, t, &QuadConfig::default())?;
            Ok((r.value, r.error))
        })())
    })
}

/// Stationary covariance of the second-kind process at times s, t by
/// quadrature over the truncated moving-average representation;
/// `trunc_tol` bounds the discarded history mass and `err_out`
/// (nullable) receives the combined error bound. Requires 1/2 < H < 1.
#[no_mangle]
pub unsafe extern "C" fn fou_fou2_cov(
    params: FouParams,
    s: f64,
    t: f64,
    trunc_tol: f64,
    out: *mut f64,
    err_out: *mut f64,
) -> FouStatus {
    guarded(|| {
        deliver_quad(out, err_out, (|| {
            let r = fou2_cov(
                &to_model(params)?,
                s,
                t,
                &TruncationPolicy::auto(trunc_tol)?,
                &QuadConfig::default(),
            )?;
            Ok((r.value, r.error))
        })())
    })
}

/// Moving-average kernel of the driver at separation x != 0.
/// Requires 1/2 < H < 1.
#[no_mangle]
pub unsafe extern "C" fn fou_kernel_eval(params: FouParams, x: f64, out: *mut f64) -> FouStatus {
    guarded(|| {
        deliver_f64(out, to_model(params).and_then(|p| KernelSpec::for_params(&p)?.eval(x)))
    })
}

/// Variance slope kappa of the driver at large times; the rescaled
/// driver converges weakly to sqrt(kappa) times Brownian motion.
/// Requires 1/2 < H < 1.
#[no_mangle]
pub unsafe extern "C" fn fou_weak_limit_kappa(params: FouParams, out: *mut f64) -> FouStatus {
    guarded(|| {
        deliver_f64(out, to_model(params).and_then(|p| Ok(weak_limit_constants(&p)?.kappa)))
    })
}
