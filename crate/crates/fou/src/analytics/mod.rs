//! Closed forms and quadrature for the covariance structure of the
//! process family: adaptive Gauss-Kronrod integration with explicit
//! error accounting, the moving-average kernel of the driver, and the
//! covariance functions themselves.

pub mod cov;
pub mod kernel;
pub mod quad;
pub mod special;

pub use cov::{
    doob_cov, doob_decay_rate, doob_variance, driver_autocov, driver_cov, driver_increment_cov,
    driver_var, fou1_cov_asymptotic, fou1_stationary_variance, fou2_cov, fou2_decay_rate, ou_cov,
    scaled_driver_cov,
};
pub use kernel::{kernel_const, weak_limit_constants, KernelSpec, WeakLimitConstants};
pub use quad::{
    integrate, integrate_power_weighted, integrate_with_algebraic_cusps, integrate_with_splits,
    QuadConfig, QuadResult,
};
