//! Moving-average kernel of the short-memory driver.
//!
//! For 1/2 < H < 1 the driver extracted from the damped time-changed
//! FBM is the integral of a stationary Gaussian noise whose covariance
//! density at separation x > 0 is
//!
//!   k(x) = C exp(-theta x) (1 - exp(-beta x))^{2H - 2},
//!
//! with theta = alpha (1 - H) / H, beta = alpha / H, and
//! C = H (2H - 1) (alpha / H)^{2(1 - H)}. The kernel integrates to
//! kappa / 2 where kappa = 2 C (H / alpha) B(1 - H, 2H - 1); kappa is
//! the variance slope of the driver at large times and sqrt(kappa) the
//! diffusion coefficient of its Brownian scaling limit.

use crate::analytics::special::ln_beta;
use crate::error::{FouError, Result};
use crate::types::ModelParams;

/// Evaluations and tail bounds for the driver's covariance kernel.
#[derive(Debug, Clone, Copy)]
pub struct KernelSpec {
    pub hurst: f64,
    pub alpha: f64,
    /// Prefactor C.
    pub coeff: f64,
    /// Exponential decay rate alpha (1 - H) / H.
    pub theta: f64,
    /// Rate alpha / H inside the singular factor.
    pub beta: f64,
}

impl KernelSpec {
    pub fn new(hurst: f64, alpha: f64) -> Result<Self> {
        if !(hurst > 0.5 && hurst < 1.0) {
            return Err(FouError::InvalidParameter {
                name: "hurst",
                value: hurst,
                constraint: "1/2 < H < 1 (kernel form requires long-memory FBM)",
            });
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(FouError::InvalidParameter {
                name: "alpha",
                value: alpha,
                constraint: "alpha > 0",
            });
        }
        let coeff = hurst * (2.0 * hurst - 1.0) * (alpha / hurst).powf(2.0 * (1.0 - hurst));
        Ok(KernelSpec {
            hurst,
            alpha,
            coeff,
            theta: alpha * (1.0 - hurst) / hurst,
            beta: alpha / hurst,
        })
    }

    pub fn for_params(params: &ModelParams) -> Result<Self> {
        KernelSpec::new(params.hurst, params.alpha)
    }

    /// k(x) for x != 0. The formula is even in x (the exponential
    /// prefactor and the singular factor trade exactly under x -> -x),
    /// so negative separations evaluate at |x|. Diverges like
    /// |x|^{2H-2} at 0.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x == 0.0 || !x.is_finite() {
            return Err(FouError::Domain(format!(
                "kernel is singular at x = 0 and needs finite x, got {x} \
                 (integrals across 0 must use the substitution quadrature)"
            )));
        }
        let x = x.abs();
        Ok(self.coeff
            * (-self.theta * x).exp()
            * (-(-self.beta * x).exp_m1()).powf(2.0 * self.hurst - 2.0))
    }

    /// The exponent of the singular factor at zero, 2H - 2 in (-1, 0).
    pub fn singular_exponent(&self) -> f64 {
        2.0 * self.hurst - 2.0
    }

    /// Power p = 1/(2H-1) of the substitution x = w^p that removes the
    /// endpoint singularity (see `integrate_power_weighted`).
    pub fn substitution_exponent(&self) -> f64 {
        1.0 / (2.0 * self.hurst - 1.0)
    }

    /// g(x) = k(x) x^{2 - 2H}, continuous on [0, inf) with
    /// g(0) = C beta^{2H - 2}. Pair with `singular_exponent` and the
    /// power-weighted quadrature.
    pub fn smooth_factor(&self, x: f64) -> f64 {
        let ratio = if x == 0.0 {
            self.beta
        } else {
            -(-self.beta * x).exp_m1() / x
        };
        self.coeff * (-self.theta * x).exp() * ratio.powf(2.0 * self.hurst - 2.0)
    }

    /// Closed form of the full integral: C (H / alpha) B(1 - H, 2H - 1)
    /// = kappa / 2.
    pub fn integral(&self) -> Result<f64> {
        let lb = ln_beta(1.0 - self.hurst, 2.0 * self.hurst - 1.0)?;
        Ok(self.coeff * (self.hurst / self.alpha) * lb.exp())
    }

    /// Upper bound for the tail integral over [x, inf), valid for any
    /// x > 0: the singular factor is monotone, so it is frozen at x and
    /// the exponential integrates exactly.
    pub fn tail_integral_bound(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(FouError::Domain(format!(
                "tail bound needs x > 0, got {x}"
            )));
        }
        let frozen = (-(-self.beta * x).exp_m1()).powf(2.0 * self.hurst - 2.0);
        Ok(self.coeff * frozen * (-self.theta * x).exp() / self.theta)
    }

    /// Smallest convenient cutoff X with tail integral at most abs_tol.
    pub fn truncation_point(&self, abs_tol: f64) -> Result<f64> {
        if !(abs_tol > 0.0) {
            return Err(FouError::Usage(format!(
                "truncation tolerance must be positive, got {abs_tol}"
            )));
        }
        // Beyond x = 1/beta the frozen singular factor is order one;
        // start from the log estimate and verify against the bound.
        let frozen = (-(-1.0f64).exp_m1()).powf(2.0 * self.hurst - 2.0);
        let mut x = (1.0 / self.beta)
            .max((self.coeff * frozen / (self.theta * abs_tol)).ln().max(0.0) / self.theta);
        while self.tail_integral_bound(x)? > abs_tol {
            x *= 1.5;
        }
        Ok(x)
    }
}

/// Variance slope kappa = 2 C (H / alpha) B(1 - H, 2H - 1) of the
/// driver at large times.
pub fn kernel_const(params: &ModelParams) -> Result<f64> {
    Ok(2.0 * KernelSpec::for_params(params)?.integral()?)
}

/// Constants of the Brownian scaling limit of the driver: the rescaled
/// covariance converges to kappa min(s, t), i.e. the limit is
/// sigma B_t with sigma = sqrt(kappa).
#[derive(Debug, Clone, Copy)]
pub struct WeakLimitConstants {
    pub kappa: f64,
    pub sigma: f64,
}

pub fn weak_limit_constants(params: &ModelParams) -> Result<WeakLimitConstants> {
    let kappa = kernel_const(params)?;
    Ok(WeakLimitConstants { kappa, sigma: kappa.sqrt() })
}
