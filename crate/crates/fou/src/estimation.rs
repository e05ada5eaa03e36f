//! Monte Carlo estimators and the statistical experiments built on
//! them: covariance estimation with standard errors, stationarity
//! z-tests, the range-dependence dichotomy, decay-rate regression,
//! Hölder-exponent estimation, and the Brownian-scaling experiment for
//! the driver.
//!
//! Every process in this crate is centered, so the covariance
//! estimator uses the known zero mean instead of subtracting sample
//! means; that halves the estimator variance and keeps one-path inputs
//! an explicit error rather than a silent zero.

use rayon::prelude::*;

use crate::analytics::{scaled_driver_cov, weak_limit_constants, QuadConfig};
use crate::error::{FouError, Result};
use crate::transforms::{driver_process, PathConfig};
use crate::types::{Ensemble, ModelParams, SamplePath, TimeGrid};

/// Known-mean covariance estimate from an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovEstimate {
    pub value: f64,
    pub std_error: f64,
    pub count: usize,
}

/// Least-squares line fit, with the window it was fitted on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub fit_range: (f64, f64),
}

/// Verdict of the range-dependence dichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeClass {
    ShortRange,
    LongRange,
    Inconclusive,
}

/// Classification plus both competing fits, so callers can read the
/// power-law exponent or the exponential rate regardless of verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDiagnostic {
    pub class: RangeClass,
    /// ln|rho| against ln n; slope is the power-law exponent.
    pub power_fit: FitReport,
    /// ln|rho| against n; negated slope is the exponential rate.
    pub exp_fit: FitReport,
    /// Partial sums settled within the Cauchy tolerance.
    pub partial_sum_converged: bool,
}

/// Shift-invariance test result: covariance at (h, h+lag) per shift h
/// and the largest pairwise z-score.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    pub lag: f64,
    pub estimates: Vec<(f64, CovEstimate)>,
    pub max_z: f64,
    pub pass: bool,
}

/// How the scaling experiment obtains covariances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakMode {
    /// Deterministic: quadrature values of the scaled driver covariance.
    Quadrature,
    /// Simulated: driver paths on the dilated clock, scaled back down.
    MonteCarlo { seed: u64, count: usize },
}

/// One (a, probe) cell of the scaling experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakRow {
    pub a: f64,
    pub estimate: f64,
    /// Quadrature error bound or Monte Carlo standard error.
    pub std_error: f64,
    /// What this cell is compared against: the Brownian limit in
    /// quadrature mode, the same-scale quadrature value in Monte Carlo
    /// mode (exact min(s,t) at H = 1/2).
    pub target: f64,
    /// |estimate - target|.
    pub error: f64,
}

/// Convergence record for one probe pair (s, t).
#[derive(Debug, Clone, PartialEq)]
pub struct WeakProbe {
    pub s: f64,
    pub t: f64,
    /// kappa * min(s,t), the Brownian-limit covariance.
    pub target: f64,
    pub rows: Vec<WeakRow>,
    pub errors_decreasing: bool,
    pub final_relative_error: f64,
    pub pass: bool,
}

/// Moment-based marginal normality check of the scaled value at t = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalityCheck {
    pub a: f64,
    pub skew_z: f64,
    pub kurtosis_z: f64,
    pub pass: bool,
}

/// Full report of the Brownian-scaling experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakReport {
    pub kappa: f64,
    pub probes: Vec<WeakProbe>,
    /// Present in Monte Carlo mode, one check per scale a.
    pub normality: Vec<NormalityCheck>,
    pub pass: bool,
}

/// Largest fine grid the Monte Carlo scaling experiment will factor.
const MAX_WEAK_NODES: usize = 3000;
/// Fine step of the dilated-clock quadrature in the experiment.
const WEAK_FINE_STEP: f64 = 0.25;
/// Tolerance of the partial-sum Cauchy criterion.
const CAUCHY_TOL: f64 = 1e-3;
/// z threshold of the moment normality checks.
const NORMALITY_Z: f64 = 4.0;

/// Mean product of path values at two grid times, with its standard
/// error from the sample variance of the products. The processes are
/// centered, so no means are subtracted.
pub fn empirical_cov(ens: &Ensemble, s: f64, t: f64) -> Result<CovEstimate> {
    let i = ens.grid.index_of(s)?;
    let j = ens.grid.index_of(t)?;
    let n = ens.n_paths();
    if n < 2 {
        return Err(FouError::Usage(format!(
            "covariance standard error needs at least 2 paths, got {n}"
        )));
    }
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for p in 0..n {
        let prod = ens.value(p, i) * ens.value(p, j);
        sum += prod;
        sumsq += prod * prod;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sumsq / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    Ok(CovEstimate { value: mean, std_error: (var / nf).sqrt(), count: n })
}

/// Covariance at (h, h + lag) for each shift h, with the largest
/// pairwise z-score across shifts. Stationary ensembles pass at
/// max |z| < 3.
pub fn stationarity_test(ens: &Ensemble, lag: f64, shifts: &[f64]) -> Result<StationarityReport> {
    if shifts.len() < 2 {
        return Err(FouError::Usage(format!(
            "stationarity test needs at least 2 shifts, got {}",
            shifts.len()
        )));
    }
    let mut estimates = Vec::with_capacity(shifts.len());
    for &h in shifts {
        estimates.push((h, empirical_cov(ens, h, h + lag)?));
    }
    let mut max_z: f64 = 0.0;
    for i in 0..estimates.len() {
        for j in i + 1..estimates.len() {
            let (a, b) = (estimates[i].1, estimates[j].1);
            let se = a.std_error.hypot(b.std_error);
            if se > 0.0 {
                max_z = max_z.max((a.value - b.value).abs() / se);
            }
        }
    }
    Ok(StationarityReport { lag, estimates, max_z, pass: max_z < 3.0 })
}

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy <= 1e-300 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, intercept, r2)
}

/// Classify an autocovariance sequence rho(1), rho(2), ... as short- or
/// long-range dependent.
///
/// Two regressions compete on ln|rho|: against ln n (power law) and
/// against n (exponential). A power-law winner with exponent in (-1, 0)
/// has divergent partial sums, hence long range; an exponential winner,
/// a summable power law (exponent <= -1), or partial sums that have
/// already settled within the Cauchy tolerance mean short range.
pub fn range_dependence_diagnostic(autocov: &[f64]) -> Result<RangeDiagnostic> {
    if autocov.len() < 16 {
        return Err(FouError::Usage(format!(
            "range diagnostic needs at least 16 lags, got {}",
            autocov.len()
        )));
    }
    if autocov.iter().any(|v| !v.is_finite()) {
        return Err(FouError::Usage("autocovariance sequence contains non-finite values".into()));
    }
    let n = autocov.len();
    let mut lags = Vec::with_capacity(n);
    let mut logs = Vec::with_capacity(n);
    for (i, &v) in autocov.iter().enumerate() {
        if v.abs() > 1e-300 {
            lags.push((i + 1) as f64);
            logs.push(v.abs().ln());
        }
    }
    let half_sum: f64 = autocov[..n / 2].iter().sum();
    let full_sum: f64 = autocov.iter().sum();
    let partial_sum_converged = (full_sum - half_sum).abs() < CAUCHY_TOL;

    if lags.len() < 8 {
        // Nearly-vanishing sequence: trivially summable.
        let degenerate = FitReport {
            slope: 0.0,
            intercept: 0.0,
            r_squared: 0.0,
            fit_range: (1.0, n as f64),
        };
        return Ok(RangeDiagnostic {
            class: RangeClass::ShortRange,
            power_fit: degenerate,
            exp_fit: degenerate,
            partial_sum_converged,
        });
    }

    let log_lags: Vec<f64> = lags.iter().map(|l| l.ln()).collect();
    let (ps, pi, pr2) = ols(&log_lags, &logs);
    let (es, ei, er2) = ols(&lags, &logs);
    let range = (lags[0], lags[lags.len() - 1]);
    let power_fit = FitReport { slope: ps, intercept: pi, r_squared: pr2, fit_range: range };
    let exp_fit = FitReport { slope: es, intercept: ei, r_squared: er2, fit_range: range };

    let class = if partial_sum_converged {
        RangeClass::ShortRange
    } else if pr2 > er2 {
        if ps > -1.0 && ps < 0.0 {
            RangeClass::LongRange
        } else if ps <= -1.0 {
            RangeClass::ShortRange
        } else {
            RangeClass::Inconclusive
        }
    } else if er2 > 0.9 && es < 0.0 {
        RangeClass::ShortRange
    } else {
        RangeClass::Inconclusive
    };
    Ok(RangeDiagnostic { class, power_fit, exp_fit, partial_sum_converged })
}

/// Least-squares slope of ln(value) against tau over the window; used
/// to read exponential decay rates off analytic covariance curves.
pub fn decay_rate_fit(curve: &[(f64, f64)], window: (f64, f64)) -> Result<FitReport> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(FouError::Usage(format!("decay window must be increasing, got [{lo}, {hi}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(tau, v) in curve {
        if tau >= lo && tau <= hi {
            if !(v > 0.0) {
                return Err(FouError::Usage(format!(
                    "decay fit needs positive values, got {v} at tau = {tau}"
                )));
            }
            xs.push(tau);
            ys.push(v.ln());
        }
    }
    if xs.len() < 3 {
        return Err(FouError::Usage(format!(
            "decay fit needs at least 3 points in [{lo}, {hi}], got {}",
            xs.len()
        )));
    }
    let (slope, intercept, r_squared) = ols(&xs, &ys);
    Ok(FitReport { slope, intercept, r_squared, fit_range: window })
}

/// Hölder exponent estimate: regression of the log maximum increment
/// over windows of `scale` grid steps against the log window size, on a
/// uniform grid with at least 4 dyadic scales.
pub fn holder_exponent(path: &SamplePath, scales: &[usize]) -> Result<FitReport> {
    let step = path
        .grid
        .uniform_step()
        .ok_or_else(|| FouError::Usage("Hölder estimation needs a uniform grid".into()))?;
    if scales.len() < 4 {
        return Err(FouError::Usage(format!(
            "Hölder estimation needs at least 4 scales, got {}",
            scales.len()
        )));
    }
    let n = path.values.len();
    let mut xs = Vec::with_capacity(scales.len());
    let mut ys = Vec::with_capacity(scales.len());
    for w in scales.windows(2) {
        if w[1] <= w[0] {
            return Err(FouError::Usage("scales must be strictly increasing".into()));
        }
    }
    for &k in scales {
        if k == 0 || k >= n {
            return Err(FouError::Usage(format!(
                "scale {k} outside the usable range 1..{}",
                n - 1
            )));
        }
        let max_inc = (0..n - k)
            .map(|i| (path.values[i + k] - path.values[i]).abs())
            .fold(0.0, f64::max);
        if max_inc <= 0.0 {
            return Err(FouError::Usage(format!("path has no variation at scale {k}")));
        }
        xs.push((k as f64 * step).ln());
        ys.push(max_inc.ln());
    }
    let (slope, intercept, r_squared) = ols(&xs, &ys);
    let range = (scales[0] as f64 * step, scales[scales.len() - 1] as f64 * step);
    Ok(FitReport { slope, intercept, r_squared, fit_range: range })
}

/// Brownian-scaling experiment for the driver: follow the scaled
/// covariance a^{-1} Cov(Y_{as}, Y_{at}) toward its limit
/// kappa min(s,t) along increasing scales a.
///
/// Quadrature mode evaluates the covariance deterministically (needs
/// H > 1/2 for the kernel route) and requires the errors against the
/// limit to shrink. Monte Carlo mode simulates driver paths on the
/// dilated clock, scales them back, tests each cell against the
/// same-scale quadrature value (exact min(s,t) at H = 1/2, where the
/// driver is already Brownian), and additionally z-tests skewness and
/// excess kurtosis of the scaled value at t = 1.
pub fn weak_convergence_experiment(
    params: &ModelParams,
    a_values: &[f64],
    probes: &[(f64, f64)],
    mode: WeakMode,
) -> Result<WeakReport> {
    params.validate()?;
    if a_values.is_empty() || probes.is_empty() {
        return Err(FouError::Usage("need at least one scale and one probe pair".into()));
    }
    for w in a_values.windows(2) {
        if w[1] <= w[0] {
            return Err(FouError::Usage("scales a must be strictly increasing".into()));
        }
    }
    if !(a_values[0] > 0.0) {
        return Err(FouError::Usage("scales a must be positive".into()));
    }
    for &(s, t) in probes {
        if !(s > 0.0 && t > 0.0) {
            return Err(FouError::Usage(format!("probe times must be positive, got ({s}, {t})")));
        }
    }
    let h = params.hurst;
    let brownian = h == 0.5;
    if h < 0.5 {
        return Err(FouError::Domain(format!(
            "the scaling experiment needs hurst >= 1/2 for its covariance oracle, got {h}"
        )));
    }
    let kappa = if brownian { 1.0 } else { weak_limit_constants(params)?.kappa };
    let qc = QuadConfig::default();

    // (estimate, std_error, per-cell target), probe-major.
    let cells: Vec<(f64, f64, f64)> = match mode {
        WeakMode::Quadrature => {
            if brownian {
                return Err(FouError::Domain(
                    "quadrature mode needs hurst > 1/2; at H = 1/2 the limit is exact".into(),
                ));
            }
            let mut jobs = Vec::new();
            for &(s, t) in probes {
                for &a in a_values {
                    jobs.push((a, s, t));
                }
            }
            let results: Result<Vec<(f64, f64, f64)>> = jobs
                .par_iter()
                .map(|&(a, s, t)| {
                    let r = scaled_driver_cov(params, a, s, t, &qc)?;
                    Ok((r.value, r.error, kappa * s.min(t)))
                })
                .collect();
            results?
        }
        WeakMode::MonteCarlo { seed, count } => {
            let mut cells = Vec::new();
            for &(s, t) in probes {
                for &a in a_values {
                    let (est, se) = mc_scaled_cov(params, a, s, t, seed, count)?;
                    let oracle = if brownian {
                        s.min(t)
                    } else {
                        scaled_driver_cov(params, a, s, t, &qc)?.value
                    };
                    cells.push((est, se, oracle));
                }
            }
            cells
        }
    };

    let mut report_probes = Vec::with_capacity(probes.len());
    let mut idx = 0;
    for &(s, t) in probes {
        let limit = kappa * s.min(t);
        let mut rows = Vec::with_capacity(a_values.len());
        for &a in a_values {
            let (estimate, std_error, target) = cells[idx];
            idx += 1;
            rows.push(WeakRow { a, estimate, std_error, target, error: (estimate - target).abs() });
        }
        let errors_decreasing = rows.windows(2).all(|w| w[1].error < w[0].error);
        let final_relative_error =
            rows.last().map(|r| (r.estimate - limit).abs() / limit.abs()).unwrap_or(1.0);
        let pass = match mode {
            WeakMode::Quadrature => errors_decreasing && final_relative_error < 0.05,
            // Statistical mode: every cell within 5 SE of its same-scale oracle.
            WeakMode::MonteCarlo { .. } => {
                rows.iter().all(|r| r.std_error > 0.0 && r.error <= 5.0 * r.std_error)
            }
        };
        report_probes.push(WeakProbe {
            s,
            t,
            target: limit,
            rows,
            errors_decreasing,
            final_relative_error,
            pass,
        });
    }

    let normality = match mode {
        WeakMode::Quadrature => Vec::new(),
        WeakMode::MonteCarlo { seed, count } => {
            let mut checks = Vec::with_capacity(a_values.len());
            for &a in a_values {
                checks.push(mc_normality(params, a, seed, count)?);
            }
            checks
        }
    };

    let pass =
        report_probes.iter().all(|p| p.pass) && normality.iter().all(|c| c.pass);
    Ok(WeakReport { kappa, probes: report_probes, normality, pass })
}

/// Driver ensemble on the dilated clock for one scale, reused by the
/// covariance cells and the normality check.
fn scaled_driver_ensemble(
    params: &ModelParams,
    a: f64,
    clock_times: &[f64],
    seed: u64,
    count: usize,
) -> Result<Ensemble> {
    let mut times = vec![0.0];
    times.extend_from_slice(clock_times);
    times.sort_by(f64::total_cmp);
    times.dedup();
    let grid = TimeGrid::new(times)?;
    let gaps = grid.times().windows(2).map(|w| w[1] - w[0]);
    let max_gap = gaps.fold(0.0, f64::max);
    let refinement = ((max_gap / WEAK_FINE_STEP).ceil() as usize).max(1);
    let fine_nodes = (grid.len() - 1) * refinement + 1;
    if fine_nodes > MAX_WEAK_NODES {
        return Err(FouError::Config(format!(
            "scale a = {a} needs {fine_nodes} quadrature nodes, over the budget of \
             {MAX_WEAK_NODES}; drop the largest scales or use quadrature mode"
        )));
    }
    driver_process(params, &grid, seed, count, &PathConfig { refinement })
}

fn mc_scaled_cov(
    params: &ModelParams,
    a: f64,
    s: f64,
    t: f64,
    seed: u64,
    count: usize,
) -> Result<(f64, f64)> {
    let ens = scaled_driver_ensemble(params, a, &[a * s, a * t], seed, count)?;
    let est = empirical_cov(&ens, a * s, a * t)?;
    Ok((est.value / a, est.std_error / a))
}

fn mc_normality(params: &ModelParams, a: f64, seed: u64, count: usize) -> Result<NormalityCheck> {
    let ens = scaled_driver_ensemble(params, a, &[a], seed, count)?;
    let idx = ens.grid.index_of(a)?;
    let scale = a.sqrt();
    let values: Vec<f64> = (0..ens.n_paths()).map(|p| ens.value(p, idx) / scale).collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &v in &values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let skew = m3 / m2.powf(1.5);
    let excess = m4 / (m2 * m2) - 3.0;
    let skew_z = skew / (6.0 / n).sqrt();
    let kurtosis_z = excess / (24.0 / n).sqrt();
    Ok(NormalityCheck {
        a,
        skew_z,
        kurtosis_z,
        pass: skew_z.abs() < NORMALITY_Z && kurtosis_z.abs() < NORMALITY_Z,
    })
}
