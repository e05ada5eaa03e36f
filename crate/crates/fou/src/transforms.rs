//! Pathwise constructions: the time change, the driver extraction,
//! Langevin solving, and the two process-kind samplers.
//!
//! Everything here follows one quadrature discipline: stochastic
//! integrals against the rough paths are never discretized as sums of
//! increments. Each one is first rewritten by partial integration into
//! an ordinary Riemann integral of exactly sampled Gaussian values
//! against a smooth weight, then evaluated by trapezoid rule on an
//! internally refined grid ([`PathConfig::refinement`] subintervals per
//! user interval; history windows use a quadratically graded grid with
//! 16 x refinement nodes that nests under refinement doubling).
//!
//! Improper integrals over the infinite past are truncated at a depth
//! solved from an analytic tail bound so the discarded mass stays below
//! the [`TruncationPolicy`] tolerance.
//!
//! The two-sided extension behind stationary first-kind starts joins
//! two independent one-sided copies at 0. At H = 1/2 the resulting
//! stationary process is exact; away from H = 1/2 the independence of
//! the halves leaves a covariance transient that decays like
//! e^{-alpha t}, so stationarity tests should skip a burn-in window of
//! a few multiples of 1/alpha.

use rayon::prelude::*;

use crate::analytics::special::gamma;
use crate::error::{FouError, Result};
use crate::fbm::{cholesky_with_jitter, draw_normals, gram, lower_tri_mul};
use crate::rng::path_rng;
use crate::types::{
    Ensemble, ModelParams, ProcessKind, SamplePath, TimeGrid, TruncationPolicy,
};

/// Largest ln a(t) for which a(t) itself fits in f64.
const MAX_LOG_CLOCK: f64 = 709.0;
/// |2H ln a(t)| budget keeping every Gram entry a(t)^{2H} normal.
const MAX_LOG_GRAM: f64 = 700.0;
/// History nodes per unit of refinement for graded truncation windows.
const HISTORY_FACTOR: usize = 16;
/// Hard cap on truncation depth; beyond this the tolerance is declared
/// unreachable rather than silently degraded.
const MAX_HISTORY_DEPTH: f64 = 10_000.0;

/// The deterministic clock a(t) = (H/alpha) e^{alpha t / H}.
///
/// Evaluating a self-similar process at this clock and damping by
/// e^{-alpha t} produces a stationary process; at H = 1/2 the clock is
/// e^{2 alpha t} / (2 alpha), the classical Doob construction for
/// Brownian motion.
#[derive(Debug, Clone, Copy)]
pub struct TimeChange {
    hurst: f64,
    alpha: f64,
}

impl TimeChange {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        Ok(TimeChange { hurst: params.hurst, alpha: params.alpha })
    }

    /// ln a(t); finite for every finite t, so usable far outside the
    /// representable range of a(t) itself.
    pub fn log_value(&self, t: f64) -> f64 {
        (self.hurst / self.alpha).ln() + self.alpha * t / self.hurst
    }

    /// a(t), strictly increasing and positive.
    pub fn value(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(FouError::Usage(format!("clock argument must be finite, got {t}")));
        }
        let lv = self.log_value(t);
        if lv > MAX_LOG_CLOCK {
            return Err(FouError::Domain(format!(
                "time change overflows at t = {t}: ln a(t) = {lv:.1} exceeds the f64 range"
            )));
        }
        Ok(lv.exp())
    }

    /// t with a(t) = x, for x > 0.
    pub fn inverse(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(FouError::Domain(format!(
                "clock inverse needs a positive finite value, got {x}"
            )));
        }
        Ok(self.hurst / self.alpha * (self.alpha * x / self.hurst).ln())
    }
}

/// Discretization knobs shared by the path constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathConfig {
    /// Subintervals inserted between consecutive user grid points for
    /// the internal trapezoid quadratures. History windows get
    /// 16 x refinement graded nodes.
    pub refinement: usize,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig { refinement: 8 }
    }
}

impl PathConfig {
    fn checked(&self) -> Result<usize> {
        if self.refinement == 0 || self.refinement > 1 << 14 {
            return Err(FouError::InvalidParameter {
                name: "refinement",
                value: self.refinement as f64,
                constraint: "1 <= refinement <= 16384",
            });
        }
        Ok(self.refinement)
    }
}

/// Initial condition for first-kind paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fou1Init {
    /// Start at 0; the path is a plain Langevin solution from rest.
    Zero,
    /// Stationary start xi = int_{cutoff}^0 e^{alpha s} dZ_s drawn from
    /// the same two-sided sample as the path, with the cutoff solved
    /// from the tail bound of the policy.
    StationaryTruncated(TruncationPolicy),
}

/// Construction route for second-kind paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fou2Method {
    /// Extract the driver, then run the Langevin recursion on it with a
    /// stationary initial value from the truncated history integral.
    LangevinOnY,
    /// Evaluate the closed integral form against the underlying FBM by
    /// partial integration; no intermediate driver path.
    DirectTransform,
}

/// Exact joint Gaussian draw of FBM at strictly increasing positive
/// times; returns path-major values and the Cholesky jitter used.
fn sample_at_clock(hurst: f64, clock: &[f64], seed: u64, count: usize) -> Result<(Vec<f64>, f64)> {
    let g = gram(hurst, clock);
    let (factor, jitter) = cholesky_with_jitter(&g)?;
    let n = clock.len();
    let mut values = vec![0.0; count * n];
    values.par_chunks_mut(n).enumerate().for_each(|(idx, row)| {
        let mut rng = path_rng(seed, idx as u64);
        let mut z = Vec::with_capacity(n);
        draw_normals(&mut rng, n, &mut z);
        lower_tri_mul(&factor, &z, row);
    });
    Ok((values, jitter))
}

/// X_t = e^{-alpha t} Z_{a(t)} sampled exactly on `times` (strictly
/// increasing, negatives allowed). Path-major values plus jitter.
fn doob_values(
    params: &ModelParams,
    times: &[f64],
    seed: u64,
    count: usize,
) -> Result<(Vec<f64>, f64)> {
    let tc = TimeChange::new(params)?;
    let h = params.hurst;
    let mut clock = Vec::with_capacity(times.len());
    for &t in times {
        let lv = tc.log_value(t);
        if lv > MAX_LOG_CLOCK || 2.0 * h * lv > MAX_LOG_GRAM {
            return Err(FouError::Domain(format!(
                "time change overflows at t = {t}: a(t)^{{2H}} leaves the f64 range"
            )));
        }
        if 2.0 * h * lv < -MAX_LOG_GRAM {
            return Err(FouError::Domain(format!(
                "time change underflows at t = {t}: a(t)^{{2H}} is subnormal"
            )));
        }
        clock.push(lv.exp());
    }
    for i in 1..clock.len() {
        if !(clock[i] > clock[i - 1]) {
            return Err(FouError::Numerical(format!(
                "clock times collapse between t = {} and t = {}: grid spacing is below clock resolution",
                times[i - 1],
                times[i]
            )));
        }
    }
    let (mut values, jitter) = sample_at_clock(h, &clock, seed, count)?;
    if jitter > 0.0 {
        // Jitter noise sigma = sqrt(jitter) gets multiplied by the
        // history damping e^{-alpha t_min}; refuse when that would be
        // visible against the process scale (H/alpha)^H.
        let amplified = jitter.sqrt() * (-params.alpha * times[0]).exp();
        if amplified > 1e-7 * (h / params.alpha).powf(h) {
            return Err(FouError::Numerical(format!(
                "clock covariance required jitter {jitter:.3e}, which the history \
                 damping would amplify to {amplified:.3e}; grid too extreme"
            )));
        }
    }
    let n = times.len();
    let damp: Vec<f64> = times.iter().map(|&t| (-params.alpha * t).exp()).collect();
    values.par_chunks_mut(n).for_each(|row| {
        for (v, d) in row.iter_mut().zip(&damp) {
            *v *= d;
        }
    });
    Ok((values, jitter))
}

/// Stationary transform ensemble X_t = e^{-alpha t} Z_{a(t)} on an
/// arbitrary grid (negative times welcome), sampled exactly on the
/// transformed clock.
pub fn doob_transform(
    params: &ModelParams,
    grid: &TimeGrid,
    seed: u64,
    count: usize,
) -> Result<Ensemble> {
    let (values, jitter) = doob_values(params, grid.times(), seed, count)?;
    let n = grid.len();
    let paths: Vec<Vec<f64>> = values.chunks(n).map(|c| c.to_vec()).collect();
    let mut ens = Ensemble::from_paths(ProcessKind::DoobTransform, *params, grid.clone(), seed, paths)?;
    if jitter > 0.0 {
        ens.diagnostics.push(format!("clock covariance factored with jitter {jitter:.3e}"));
    }
    Ok(ens)
}

/// Refined copy of the grid with `refinement` equal subintervals per
/// user interval; returns fine times and the fine index of each user
/// node.
fn refine_grid(grid: &TimeGrid, refinement: usize) -> (Vec<f64>, Vec<usize>) {
    let times = grid.times();
    let mut fine = Vec::with_capacity((times.len().saturating_sub(1)) * refinement + 1);
    let mut user_idx = Vec::with_capacity(times.len());
    fine.push(times[0]);
    user_idx.push(0);
    for w in times.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        for i in 1..refinement {
            fine.push(lo + (hi - lo) * i as f64 / refinement as f64);
        }
        fine.push(hi);
        user_idx.push(fine.len() - 1);
    }
    (fine, user_idx)
}

/// Quadratically graded history nodes on [-depth, 0), ascending,
/// densest near 0. Node set nests when `m` doubles.
fn graded_history(depth: f64, m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| {
            let k = (m - j) as f64 / m as f64;
            -depth * k * k
        })
        .collect()
}

/// Langevin recursion on a driver sampled at `times` (t_0 = 0,
/// w_0 = 0): U_t = e^{-rate t} x0 + W_t - rate e^{-rate t}
/// int_0^t e^{rate s} W_s ds, with the integral kept in discounted form
/// V_j = e^{-rate d} V_{j-1} + (d/2)(e^{-rate d} W_{j-1} + W_j) so no
/// exponential ever overflows.
fn langevin_values(times: &[f64], w: &[f64], rate: f64, x0: f64) -> Vec<f64> {
    let n = times.len();
    let mut out = vec![0.0; n];
    out[0] = x0;
    let mut v = 0.0;
    for j in 1..n {
        let d = times[j] - times[j - 1];
        let e = (-rate * d).exp();
        v = e * v + 0.5 * d * (e * w[j - 1] + w[j]);
        out[j] = x0 * (-rate * times[j]).exp() + w[j] - rate * v;
    }
    out
}

/// Solve dU = -rate U dt + dW pathwise for a driver path W with
/// W_0 = 0 at time 0, by the partial-integration form
/// U_t = e^{-rate t}(x0 + e^{rate t} W_t - rate int_0^t e^{rate s} W_s ds)
/// with trapezoid quadrature on the driver grid.
pub fn langevin_solve(driver: &SamplePath, rate: f64, x0: f64) -> Result<SamplePath> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(FouError::Domain(format!(
            "Langevin rate must be positive and finite, got {rate}"
        )));
    }
    if !x0.is_finite() {
        return Err(FouError::Usage(format!("initial value must be finite, got {x0}")));
    }
    let times = driver.grid.times();
    if times[0] != 0.0 {
        return Err(FouError::Usage(format!(
            "driver must start at time 0, starts at {}",
            times[0]
        )));
    }
    if driver.values[0] != 0.0 {
        return Err(FouError::Usage(format!(
            "driver must start with value 0, starts at {}",
            driver.values[0]
        )));
    }
    let values = langevin_values(times, &driver.values, rate, x0);
    SamplePath::new(driver.grid.clone(), values)
}

/// Driver ensemble Y_t = X_t - X_0 + alpha int_0^t X_s ds extracted
/// from the stationary transform X, reported on the user grid with the
/// integral taken on the refined grid.
pub fn driver_process(
    params: &ModelParams,
    grid: &TimeGrid,
    seed: u64,
    count: usize,
    config: &PathConfig,
) -> Result<Ensemble> {
    if grid.first() != 0.0 {
        return Err(FouError::Usage(format!(
            "driver grid must start at 0, starts at {}",
            grid.first()
        )));
    }
    let refinement = config.checked()?;
    let (fine, user_idx) = refine_grid(grid, refinement);
    let (xvals, jitter) = doob_values(params, &fine, seed, count)?;
    let nf = fine.len();
    let alpha = params.alpha;
    let paths: Vec<Vec<f64>> = xvals
        .par_chunks(nf)
        .map(|x| {
            let mut y = Vec::with_capacity(nf);
            y.push(0.0);
            let mut integral = 0.0;
            for j in 1..nf {
                integral += 0.5 * (fine[j] - fine[j - 1]) * (x[j - 1] + x[j]);
                y.push(x[j] - x[0] + alpha * integral);
            }
            user_idx.iter().map(|&i| y[i]).collect()
        })
        .collect();
    let mut ens = Ensemble::from_paths(ProcessKind::Driver, *params, grid.clone(), seed, paths)?;
    if jitter > 0.0 {
        ens.diagnostics.push(format!("clock covariance factored with jitter {jitter:.3e}"));
    }
    Ok(ens)
}

/// Self-similarity rescaling of a driver ensemble: grid times map to
/// alpha t, values to alpha^H times the originals, and the result is
/// distributed as the unit-rate driver. Only driver ensembles qualify.
pub fn rescale_driver(ens: &Ensemble) -> Result<Ensemble> {
    if ens.kind != ProcessKind::Driver {
        return Err(FouError::Usage(format!(
            "rescaling requires a driver-process ensemble, got {:?}",
            ens.kind
        )));
    }
    let alpha = ens.params.alpha;
    let scale = alpha.powf(ens.params.hurst);
    let times: Vec<f64> = ens.grid.times().iter().map(|&t| alpha * t).collect();
    let grid = TimeGrid::new(times)?;
    let params = ModelParams::new(ens.params.hurst, 1.0, ens.params.gamma)?;
    let paths: Vec<Vec<f64>> = (0..ens.n_paths())
        .map(|p| ens.path(p).iter().map(|&v| scale * v).collect())
        .collect();
    let mut out = Ensemble::from_paths(ProcessKind::Driver, params, grid, ens.seed, paths)?;
    out.diagnostics = ens.diagnostics.clone();
    out.diagnostics.push(format!("rescaled from rate {alpha} to rate 1"));
    Ok(out)
}

/// Smallest history depth L with
/// e^{-alpha L} L^H + alpha e^{-alpha L/2} (2/alpha)^{H+1} Gamma(H+1)
/// <= tol; the bound dominates the L2 norm of the discarded
/// int_{-inf}^{-L} e^{alpha s} dZ_s after partial integration.
fn fou1_truncation_depth(params: &ModelParams, tol: f64) -> Result<f64> {
    let h = params.hurst;
    let a = params.alpha;
    let c = a * (2.0 / a).powf(h + 1.0) * gamma(h + 1.0)?;
    let bound = |l: f64| (-a * l).exp() * l.powf(h) + c * (-0.5 * a * l).exp();
    let mut hi = 1.0;
    while bound(hi) > tol {
        hi *= 2.0;
        if hi > MAX_HISTORY_DEPTH {
            return Err(FouError::Config(format!(
                "stationary truncation tolerance {tol:.3e} needs history deeper than \
                 {MAX_HISTORY_DEPTH}; use a larger tolerance"
            )));
        }
    }
    let mut lo = 0.5 * hi;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) <= tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.max(1.0))
}

/// First-kind paths: Langevin solutions driven by FBM, from rest or
/// from a truncated stationary start sampled jointly with the path.
pub fn fou1_path(
    params: &ModelParams,
    grid: &TimeGrid,
    seed: u64,
    count: usize,
    init: &Fou1Init,
    config: &PathConfig,
) -> Result<Ensemble> {
    params.validate()?;
    if grid.first() != 0.0 {
        return Err(FouError::Usage(format!(
            "first-kind grid must start at 0, starts at {}",
            grid.first()
        )));
    }
    let refinement = config.checked()?;
    let (fine, user_idx) = refine_grid(grid, refinement);
    let nf = fine.len();
    let alpha = params.alpha;

    // Positive-side factor: FBM at the fine times past 0 (the node at 0
    // is pinned to value 0 and stays out of the factorization).
    let g_pos = gram(params.hurst, &fine[1..]);
    let (f_pos, j_pos) = if nf > 1 {
        cholesky_with_jitter(&g_pos)?
    } else {
        (g_pos, 0.0)
    };

    let history = match init {
        Fou1Init::Zero => None,
        Fou1Init::StationaryTruncated(policy) => {
            let required = fou1_truncation_depth(params, policy.tolerance)?;
            let cutoff = policy.resolve_cutoff(-required)?;
            let depth = -cutoff;
            if depth > MAX_HISTORY_DEPTH {
                return Err(FouError::Config(format!(
                    "truncation cutoff {cutoff} exceeds the supported history depth \
                     {MAX_HISTORY_DEPTH}"
                )));
            }
            let m = HISTORY_FACTOR * refinement;
            let hist = graded_history(depth, m);
            // The negative half is an independent copy indexed by |s|;
            // factor it at ascending |s| = depth (k/m)^2.
            let neg_abs: Vec<f64> = (1..=m)
                .map(|k| depth * (k as f64 / m as f64).powi(2))
                .collect();
            let g_neg = gram(params.hurst, &neg_abs);
            let (f_neg, j_neg) = cholesky_with_jitter(&g_neg)?;
            Some((hist, f_neg, j_neg, depth))
        }
    };

    let n_pos = nf - 1;
    let paths: Vec<Vec<f64>> = (0..count)
        .into_par_iter()
        .map(|idx| {
            let mut rng = path_rng(seed, idx as u64);
            let mut z = Vec::new();
            let mut w = vec![0.0; nf];
            let xi = match &history {
                None => 0.0,
                Some((hist, f_neg, _, depth)) => {
                    let m = hist.len();
                    let mut neg = vec![0.0; m];
                    draw_normals(&mut rng, m, &mut z);
                    lower_tri_mul(f_neg, &z, &mut neg);
                    // neg[k-1] is the copy at |s| = depth (k/m)^2, so the
                    // value at hist[j] (= -depth ((m-j)/m)^2) is neg[m-1-j].
                    let zhat = |j: usize| neg[m - 1 - j];
                    let mut trapz = 0.0;
                    for j in 1..m {
                        let (s0, s1) = (hist[j - 1], hist[j]);
                        trapz += 0.5
                            * (s1 - s0)
                            * ((alpha * s0).exp() * zhat(j - 1) + (alpha * s1).exp() * zhat(j));
                    }
                    // Closing interval [hist[m-1], 0] with Z_0 = 0.
                    let s_last = hist[m - 1];
                    trapz += 0.5 * (0.0 - s_last) * (alpha * s_last).exp() * zhat(m - 1);
                    -(-alpha * depth).exp() * zhat(0) - alpha * trapz
                }
            };
            if n_pos > 0 {
                draw_normals(&mut rng, n_pos, &mut z);
                lower_tri_mul(&f_pos, &z, &mut w[1..]);
            }
            let u = langevin_values(&fine, &w, alpha, xi);
            user_idx.iter().map(|&i| u[i]).collect()
        })
        .collect();

    let mut ens = Ensemble::from_paths(ProcessKind::Fou1, *params, grid.clone(), seed, paths)?;
    if j_pos > 0.0 {
        ens.diagnostics.push(format!("path covariance factored with jitter {j_pos:.3e}"));
    }
    if let Some((_, _, j_neg, depth)) = &history {
        ens.diagnostics.push(format!("stationary history truncated at -{depth:.3}"));
        if *j_neg > 0.0 {
            ens.diagnostics
                .push(format!("history covariance factored with jitter {j_neg:.3e}"));
        }
    }
    Ok(ens)
}

/// History depth for second-kind paths: the discarded
/// int_{-inf}^{-L} e^{(gamma-1)s} dZ_{a_s} has L2 norm at most
/// H^H (1 + |1-gamma|/gamma) e^{-gamma L}.
fn fou2_truncation_depth(params: &ModelParams, tol: f64) -> Result<f64> {
    let h = params.hurst;
    let g = params.gamma;
    let c = h.powf(h) * (1.0 + (1.0 - g).abs() / g);
    let required = ((c / tol).ln() / g).max(1.0);
    let cap = fou2_depth_cap(h);
    if required > cap {
        return Err(FouError::Config(format!(
            "second-kind truncation tolerance {tol:.3e} needs history depth {required:.1}, \
             beyond the clock-resolution cap {cap:.1}; use a larger tolerance"
        )));
    }
    Ok(required)
}

/// Deepest usable second-kind history: past this the clock value
/// a(-L)^{2H} goes subnormal and the exact sampler loses the node.
fn fou2_depth_cap(h: f64) -> f64 {
    (0.5 * MAX_LOG_GRAM + h * h.ln()).min(MAX_HISTORY_DEPTH)
}

/// Second-kind paths: Langevin solutions at rate gamma driven by the
/// unit-rate driver, by either construction route. Both routes consume
/// the same exact Gaussian sample for a given seed, grid, and
/// refinement, so method-to-method differences isolate quadrature
/// error.
pub fn fou2_path(
    params: &ModelParams,
    grid: &TimeGrid,
    seed: u64,
    count: usize,
    method: Fou2Method,
    trunc: &TruncationPolicy,
    config: &PathConfig,
) -> Result<Ensemble> {
    params.validate()?;
    if grid.first() != 0.0 {
        return Err(FouError::Usage(format!(
            "second-kind grid must start at 0, starts at {}",
            grid.first()
        )));
    }
    let refinement = config.checked()?;
    let h = params.hurst;
    let ga = params.gamma;
    let required = fou2_truncation_depth(params, trunc.tolerance)?;
    let cutoff = trunc.resolve_cutoff(-required)?;
    let depth = -cutoff;
    if depth > fou2_depth_cap(h) {
        return Err(FouError::Config(format!(
            "truncation cutoff {cutoff} is beyond the clock-resolution cap {:.1}",
            fou2_depth_cap(h)
        )));
    }

    let (fine, user_idx) = refine_grid(grid, refinement);
    let m = HISTORY_FACTOR * refinement;
    let mut itimes = graded_history(depth, m);
    itimes.extend_from_slice(&fine);
    let ntot = itimes.len();
    let nf = fine.len();

    // The driver is extracted at unit rate; gamma only enters the
    // Langevin stage below.
    let xparams = ModelParams::new(h, 1.0, ga)?;
    let (xvals, jitter) = doob_values(&xparams, &itimes, seed, count)?;

    let paths: Vec<Vec<f64>> = xvals
        .par_chunks(ntot)
        .map(|x| {
            let u = match method {
                Fou2Method::LangevinOnY => {
                    let x0 = x[m];
                    // xi = X_0 - e^{-gamma L} X_{-L}
                    //      + (1-gamma) int_{-L}^0 e^{gamma s} X_s ds.
                    let mut trapz = 0.0;
                    for j in 1..m {
                        let (s0, s1) = (itimes[j - 1], itimes[j]);
                        trapz += 0.5
                            * (s1 - s0)
                            * ((ga * s0).exp() * x[j - 1] + (ga * s1).exp() * x[j]);
                    }
                    let s_last = itimes[m - 1];
                    trapz += 0.5 * (0.0 - s_last) * ((ga * s_last).exp() * x[m - 1] + x0);
                    let xi = x0 - (-ga * depth).exp() * x[0] + (1.0 - ga) * trapz;
                    // Driver on the fine grid at unit rate.
                    let mut y = vec![0.0; nf];
                    let mut integral = 0.0;
                    for j in 1..nf {
                        integral += 0.5 * (fine[j] - fine[j - 1]) * (x[m + j - 1] + x[m + j]);
                        y[j] = x[m + j] - x0 + integral;
                    }
                    langevin_values(&fine, &y, ga, xi)
                }
                Fou2Method::DirectTransform => {
                    // U_t = X_t - e^{-gamma(L+t)} X_{-L} - (gamma-1) M_t,
                    // M_t = e^{-gamma t} int_{-L}^t e^{gamma u} X_u du in
                    // discounted trapezoid form over the whole window.
                    let mut u = vec![0.0; nf];
                    let mut mstate = 0.0;
                    for j in 1..ntot {
                        let d = itimes[j] - itimes[j - 1];
                        let e = (-ga * d).exp();
                        mstate = e * mstate + 0.5 * d * (e * x[j - 1] + x[j]);
                        if j >= m {
                            let t = itimes[j];
                            u[j - m] = x[j] - (-ga * (depth + t)).exp() * x[0]
                                - (ga - 1.0) * mstate;
                        }
                    }
                    // Single-point grids never enter the loop at j = m.
                    if nf >= 1 && m == 0 {
                        u[0] = x[0];
                    }
                    u
                }
            };
            user_idx.iter().map(|&i| u[i]).collect()
        })
        .collect();

    let mut ens = Ensemble::from_paths(ProcessKind::Fou2, *params, grid.clone(), seed, paths)?;
    ens.diagnostics.push(format!("stationary history truncated at -{depth:.3}"));
    if jitter > 0.0 {
        ens.diagnostics.push(format!("clock covariance factored with jitter {jitter:.3e}"));
    }
    Ok(ens)
}
