//! Fractional Brownian motion: covariance structure and exact samplers.
//!
//! Conventions: Z is centered Gaussian with Z_0 = 0 and
//! E(Z_t Z_s) = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2 on t, s >= 0.
//! The increment process on a unit grid (fractional Gaussian noise) has
//! autocovariance rho(n) = ((n+1)^{2H} - 2 n^{2H} + |n-1|^{2H}) / 2.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{FouError, Result};
use crate::rng::path_rng;
use crate::types::{CovMatrix, Ensemble, ModelParams, ProcessKind, TimeGrid};

fn check_hurst(hurst: f64) -> Result<()> {
    if !(hurst > 0.0 && hurst < 1.0) || !hurst.is_finite() {
        return Err(FouError::InvalidParameter {
            name: "hurst",
            value: hurst,
            constraint: "0 < H < 1",
        });
    }
    Ok(())
}

/// E(Z_t Z_s) for t, s >= 0.
pub fn fbm_cov(hurst: f64, s: f64, t: f64) -> Result<f64> {
    check_hurst(hurst)?;
    if s < 0.0 || t < 0.0 || !s.is_finite() || !t.is_finite() {
        return Err(FouError::Domain(format!(
            "fbm_cov needs times >= 0, got s = {s}, t = {t} (use the two-sided sampler for negative times)"
        )));
    }
    let h2 = 2.0 * hurst;
    Ok(0.5 * (t.powf(h2) + s.powf(h2) - (t - s).abs().powf(h2)))
}

/// Covariance of increments over two windows,
/// E((Z_b1 - Z_a1)(Z_b2 - Z_a2)).
pub fn fbm_increment_cov(hurst: f64, w1: (f64, f64), w2: (f64, f64)) -> Result<f64> {
    let (a1, b1) = w1;
    let (a2, b2) = w2;
    if !(b1 > a1) || !(b2 > a2) {
        return Err(FouError::Usage(format!(
            "increment windows must be ordered, got ({a1}, {b1}) and ({a2}, {b2})"
        )));
    }
    Ok(fbm_cov(hurst, b1, b2)? - fbm_cov(hurst, b1, a2)? - fbm_cov(hurst, a1, b2)?
        + fbm_cov(hurst, a1, a2)?)
}

/// Autocovariance of unit-grid increments at lag n.
///
/// Large lags switch to the series form of the second difference of
/// x^{2H}: the direct formula subtracts terms of size n^{2H} and loses
/// precision once n^{2H} eps dominates the O(n^{2H-2}) value.
pub fn fgn_autocov(hurst: f64, n: u64) -> Result<f64> {
    check_hurst(hurst)?;
    let h2 = 2.0 * hurst;
    if n == 0 {
        return Ok(1.0);
    }
    let nf = n as f64;
    if n < 10_000 {
        Ok(0.5 * ((nf + 1.0).powf(h2) - 2.0 * nf.powf(h2) + (nf - 1.0).powf(h2)))
    } else {
        // 0.5 n^{2H} [(1+x)^{2H} + (1-x)^{2H} - 2], x = 1/n, expanded in
        // even powers of x.
        let c2 = hurst * (h2 - 1.0);
        let c4 = c2 * (h2 - 2.0) * (h2 - 3.0) / 12.0;
        Ok(nf.powf(h2 - 2.0) * (c2 + c4 / (nf * nf)))
    }
}

/// Leading-order tail H(2H-1) n^{2H-2} of `fgn_autocov`.
pub fn fgn_autocov_asymptotic(hurst: f64, n: u64) -> Result<f64> {
    check_hurst(hurst)?;
    if n == 0 {
        return Err(FouError::Usage("asymptotic form needs lag n >= 1".into()));
    }
    let nf = n as f64;
    Ok(hurst * (2.0 * hurst - 1.0) * nf.powf(2.0 * hurst - 2.0))
}

/// Gram matrix of FBM at the given times (no validation, internal).
pub(crate) fn gram(hurst: f64, times: &[f64]) -> DMatrix<f64> {
    let h2 = 2.0 * hurst;
    let n = times.len();
    DMatrix::from_fn(n, n, |i, j| {
        let (s, t) = (times[i], times[j]);
        0.5 * (t.abs().powf(h2) + s.abs().powf(h2) - (t - s).abs().powf(h2))
    })
}

/// FBM covariance matrix with symmetry by construction and a positive
/// semidefiniteness check.
///
/// The eigenvalue check runs for matrices up to 1024 x 1024; above that
/// the certificate is the Cholesky factorization performed at sampling
/// time (success implies PSD within jitter tolerance, failure reports
/// the most negative eigenvalue).
pub fn build_cov_matrix(hurst: f64, grid: &TimeGrid) -> Result<CovMatrix> {
    check_hurst(hurst)?;
    if grid.first() < 0.0 {
        return Err(FouError::Domain(
            "covariance matrices require times >= 0 (negative times belong to the two-sided sampler)"
                .into(),
        ));
    }
    let m = CovMatrix::from_fn(grid.times(), |s, t| {
        let h2 = 2.0 * hurst;
        0.5 * (t.powf(h2) + s.powf(h2) - (t - s).abs().powf(h2))
    });
    if m.n() <= 1024 {
        let dm = DMatrix::from_row_slice(m.n(), m.n(), m.data());
        let eigs = dm.symmetric_eigenvalues();
        let min_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        let tol = 1e-8 * m.max_diag().max(1e-300);
        if min_eig < -tol {
            return Err(FouError::Numerical(format!(
                "covariance matrix is not PSD: min eigenvalue {min_eig:.3e} below -{tol:.3e}"
            )));
        }
    }
    Ok(m)
}

/// Cholesky with escalating relative jitter. Returns the lower factor
/// and the jitter that was needed (0.0 when the plain factorization
/// succeeds).
pub(crate) fn cholesky_with_jitter(mat: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let n = mat.nrows();
    let max_diag = (0..n).map(|i| mat[(i, i)]).fold(f64::NEG_INFINITY, f64::max);
    if let Some(ch) = mat.clone().cholesky() {
        return Ok((ch.unpack(), 0.0));
    }
    let mut jitter = 1e-12 * max_diag.max(1e-300);
    let cap = 1e-8 * max_diag.max(1e-300);
    while jitter <= cap * (1.0 + 1e-12) {
        let mut m = mat.clone();
        for i in 0..n {
            m[(i, i)] += jitter;
        }
        if let Some(ch) = m.cholesky() {
            return Ok((ch.unpack(), jitter));
        }
        jitter *= 10.0;
    }
    let min_eig = mat
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    Err(FouError::Numerical(format!(
        "Cholesky failed after jitter escalation to {cap:.3e}; min eigenvalue {min_eig:.3e}"
    )))
}

/// out = L z for a lower-triangular L stored in a dense column-major
/// matrix; skips the structurally zero upper half.
pub(crate) fn lower_tri_mul(l: &DMatrix<f64>, z: &[f64], out: &mut [f64]) {
    let n = z.len();
    let ls = l.as_slice();
    out.fill(0.0);
    for j in 0..n {
        let zj = z[j];
        let base = j * n;
        for i in j..n {
            out[i] += ls[base + i] * zj;
        }
    }
}

pub(crate) fn draw_normals(rng: &mut impl Rng, n: usize, out: &mut Vec<f64>) {
    out.clear();
    out.extend((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
}

fn fbm_params(hurst: f64) -> ModelParams {
    // alpha/gamma are not used by raw FBM sampling; record defaults.
    ModelParams { hurst, alpha: 1.0, gamma: 1.0 }
}

/// Exact FBM sampling by Cholesky factorization of the Gram matrix.
///
/// Grid times must be >= 0; a leading zero time gets the exact value 0
/// and is excluded from the factorized matrix.
pub fn sample_fbm_cholesky(hurst: f64, grid: &TimeGrid, seed: u64, count: usize) -> Result<Ensemble> {
    check_hurst(hurst)?;
    if count == 0 {
        return Err(FouError::Usage("count must be at least 1".into()));
    }
    if grid.first() < 0.0 {
        return Err(FouError::Domain(
            "sample_fbm_cholesky needs times >= 0; use sample_two_sided_fbm for negative times"
                .into(),
        ));
    }
    let has_zero = grid.first() == 0.0;
    let pos: &[f64] = if has_zero { &grid.times()[1..] } else { grid.times() };
    let (factor, jitter) = cholesky_with_jitter(&gram(hurst, pos))?;
    let m = pos.len();

    let paths: Vec<Vec<f64>> = (0..count)
        .into_par_iter()
        .map(|p| {
            let mut rng = path_rng(seed, p as u64);
            let mut z = Vec::with_capacity(m);
            draw_normals(&mut rng, m, &mut z);
            let mut v = vec![0.0; m];
            lower_tri_mul(&factor, &z, &mut v);
            if has_zero {
                let mut full = Vec::with_capacity(m + 1);
                full.push(0.0);
                full.extend_from_slice(&v);
                full
            } else {
                v
            }
        })
        .collect();

    let mut ens = Ensemble::from_paths(ProcessKind::Fbm, fbm_params(hurst), grid.clone(), seed, paths)?;
    if jitter > 0.0 {
        ens.diagnostics
            .push(format!("cholesky applied diagonal jitter {jitter:.3e}"));
    }
    Ok(ens)
}

/// Circulant-embedding spectrum for fGN of length n. Returns the
/// eigenvalues of the 2n circulant, or None when the embedding is not
/// nonnegative definite within tolerance.
fn circulant_spectrum(hurst: f64, n: usize) -> Result<Option<Vec<f64>>> {
    let m = 2 * n;
    let mut row = Vec::with_capacity(m);
    for k in 0..=n {
        row.push(fgn_autocov(hurst, k as u64)?);
    }
    for k in (1..n).rev() {
        row.push(row[k]);
    }
    debug_assert_eq!(row.len(), m);

    let mut buf: Vec<Complex<f64>> = row.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let eigs: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let max = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-8 * max.max(1e-300) {
        return Ok(None);
    }
    Ok(Some(eigs.iter().map(|&l| l.max(0.0)).collect()))
}

/// Exact FBM on a uniform grid of power-of-two length via circulant
/// embedding of the increment autocovariance (FFT synthesis). Falls
/// back to the Cholesky sampler, with a diagnostic note, if the
/// embedding has negative eigenvalues beyond tolerance.
///
/// Returns paths on the grid 0, dt, ..., t_max (steps + 1 points).
pub fn sample_fbm_circulant(
    hurst: f64,
    t_max: f64,
    steps: usize,
    seed: u64,
    count: usize,
) -> Result<Ensemble> {
    check_hurst(hurst)?;
    if count == 0 {
        return Err(FouError::Usage("count must be at least 1".into()));
    }
    if !steps.is_power_of_two() {
        return Err(FouError::Usage(format!(
            "circulant sampler needs a power-of-two step count, got {steps}"
        )));
    }
    let grid = TimeGrid::uniform(t_max, steps)?;
    let dt = t_max / steps as f64;
    let scale = dt.powf(hurst);

    let Some(eigs) = circulant_spectrum(hurst, steps)? else {
        let mut ens = sample_fbm_cholesky(hurst, &grid, seed, count)?;
        ens.diagnostics.push(
            "circulant embedding not nonnegative definite; fell back to Cholesky sampling".into(),
        );
        return Ok(ens);
    };

    let n = steps;
    let m = 2 * n;
    let fft = FftPlanner::new().plan_fft_forward(m);
    let scratch_len = fft.get_inplace_scratch_len();
    let half = (eigs.iter().map(|&l| l / (2.0 * m as f64)).map(f64::sqrt)).collect::<Vec<f64>>();
    let e0 = (eigs[0] / m as f64).sqrt();
    let en = (eigs[n] / m as f64).sqrt();

    let paths: Vec<Vec<f64>> = (0..count)
        .into_par_iter()
        .map_init(
            || (vec![Complex::new(0.0, 0.0); m], vec![Complex::new(0.0, 0.0); scratch_len]),
            |(buf, scratch), p| {
                let mut rng = path_rng(seed, p as u64);
                buf[0] = Complex::new(e0 * rng.sample::<f64, _>(StandardNormal), 0.0);
                buf[n] = Complex::new(en * rng.sample::<f64, _>(StandardNormal), 0.0);
                for k in 1..n {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    let c = Complex::new(half[k] * re, half[k] * im);
                    buf[k] = c;
                    buf[m - k] = c.conj();
                }
                fft.process_with_scratch(buf, scratch);
                let mut v = Vec::with_capacity(n + 1);
                v.push(0.0);
                let mut acc = 0.0;
                for item in buf.iter().take(n) {
                    acc += item.re;
                    v.push(acc * scale);
                }
                v
            },
        )
        .collect();

    Ensemble::from_paths(ProcessKind::Fbm, fbm_params(hurst), grid, seed, paths)
}

/// Two-sided FBM through the origin: two independent FBM copies on the
/// positive and reflected negative times, anchored at Z_0 = 0. Per path
/// the negative-side normals are drawn first, then the positive side,
/// from one counter-based stream.
pub fn sample_two_sided_fbm(hurst: f64, grid: &TimeGrid, seed: u64, count: usize) -> Result<Ensemble> {
    check_hurst(hurst)?;
    if count == 0 {
        return Err(FouError::Usage("count must be at least 1".into()));
    }
    let times = grid.times();
    let neg: Vec<f64> = times.iter().filter(|&&t| t < 0.0).map(|&t| -t).rev().collect();
    let pos: Vec<f64> = times.iter().filter(|&&t| t > 0.0).cloned().collect();
    let n_neg = neg.len();
    let n_pos = pos.len();

    let mut diags = Vec::new();
    let neg_factor = if n_neg > 0 {
        let (f, j) = cholesky_with_jitter(&gram(hurst, &neg))?;
        if j > 0.0 {
            diags.push(format!("negative-side cholesky applied jitter {j:.3e}"));
        }
        Some(f)
    } else {
        None
    };
    let pos_factor = if n_pos > 0 {
        let (f, j) = cholesky_with_jitter(&gram(hurst, &pos))?;
        if j > 0.0 {
            diags.push(format!("positive-side cholesky applied jitter {j:.3e}"));
        }
        Some(f)
    } else {
        None
    };

    let paths: Vec<Vec<f64>> = (0..count)
        .into_par_iter()
        .map(|p| {
            let mut rng = path_rng(seed, p as u64);
            let mut z = Vec::new();
            let mut vneg = vec![0.0; n_neg];
            if let Some(f) = &neg_factor {
                draw_normals(&mut rng, n_neg, &mut z);
                lower_tri_mul(f, &z, &mut vneg);
            }
            let mut vpos = vec![0.0; n_pos];
            if let Some(f) = &pos_factor {
                draw_normals(&mut rng, n_pos, &mut z);
                lower_tri_mul(f, &z, &mut vpos);
            }
            // neg holds |t| ascending; walk original times back out.
            let mut v = Vec::with_capacity(times.len());
            let mut ineg = 0usize;
            let mut ipos = 0usize;
            for &t in times {
                if t < 0.0 {
                    // times ascend, so |t| descends on the negative side:
                    // index from the far end.
                    let idx = n_neg - 1 - ineg;
                    v.push(vneg[idx]);
                    ineg += 1;
                } else if t == 0.0 {
                    v.push(0.0);
                } else {
                    v.push(vpos[ipos]);
                    ipos += 1;
                }
            }
            v
        })
        .collect();

    let mut ens = Ensemble::from_paths(ProcessKind::Fbm, fbm_params(hurst), grid.clone(), seed, paths)?;
    ens.diagnostics = diags;
    Ok(ens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn cov_frozen_values() {
        // sqrt(2): 0.5 (1 + 2^{1.5} - 1)
        assert_relative_eq!(
            fbm_cov(0.75, 1.0, 2.0).unwrap(),
            1.4142135623730951,
            max_relative = 1e-15
        );
        assert_relative_eq!(fbm_cov(0.5, 1.0, 2.0).unwrap(), 1.0, max_relative = 1e-15);
        assert_eq!(fbm_cov(0.75, 0.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn increment_cov_signs_by_regime() {
        let pos = fbm_increment_cov(0.75, (1.0, 2.0), (0.0, 1.0)).unwrap();
        assert_relative_eq!(pos, 0.41421356237309515, max_relative = 1e-14);
        let neg = fbm_increment_cov(0.25, (1.0, 2.0), (0.0, 1.0)).unwrap();
        assert_relative_eq!(neg, -0.2928932188134524, max_relative = 1e-14);
        let zero = fbm_increment_cov(0.5, (1.0, 2.0), (0.0, 1.0)).unwrap();
        assert!(zero.abs() < 1e-15);
    }

    #[test]
    fn fgn_matches_increment_cov_and_tail() {
        for &h in &[0.25, 0.5, 0.6, 0.75, 0.9] {
            for n in [0u64, 1, 2, 7, 33] {
                let a = fgn_autocov(h, n).unwrap();
                let b = fbm_increment_cov(h, (n as f64, n as f64 + 1.0), (0.0, 1.0)).unwrap();
                assert!((a - b).abs() <= 1e-12, "H={h} n={n}: {a} vs {b}");
            }
        }
        // Tail ratio converges to 1 (H != 1/2).
        for &h in &[0.25, 0.75, 0.9] {
            let mut prev = f64::INFINITY;
            for n in [10u64, 100, 1000] {
                let ratio = fgn_autocov(h, n).unwrap() / fgn_autocov_asymptotic(h, n).unwrap();
                let dev = (ratio - 1.0).abs();
                assert!(dev < prev * 1.01, "H={h} n={n} deviation {dev} vs {prev}");
                prev = dev;
            }
            assert!(prev < 1e-5);
        }
    }

    #[test]
    fn fgn_series_switch_is_continuous() {
        // Direct formula at n just below the switch matches the series
        // form used just above it.
        let h = 0.75;
        let direct = 0.5
            * ((10_000.0f64 + 1.0).powf(1.5) - 2.0 * 10_000.0f64.powf(1.5)
                + (10_000.0f64 - 1.0).powf(1.5));
        let series = fgn_autocov(h, 10_000).unwrap();
        assert_relative_eq!(direct, series, max_relative = 1e-7);
    }

    #[test]
    fn build_cov_matrix_is_symmetric_and_psd() {
        let grid = TimeGrid::uniform_positive(4.0, 16).unwrap();
        let m = build_cov_matrix(0.75, &grid).unwrap();
        for i in 0..m.n() {
            for j in 0..m.n() {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
    }

    #[test]
    fn cholesky_sampler_is_deterministic_and_exact_at_bm() {
        let grid = TimeGrid::uniform_positive(2.0, 8).unwrap();
        let a = sample_fbm_cholesky(0.5, &grid, 9, 4000).unwrap();
        let b = sample_fbm_cholesky(0.5, &grid, 9, 4000).unwrap();
        assert_eq!(a.path(17), b.path(17));

        // Empirical covariance within 5 SE of min(s, t).
        let n = grid.len();
        for i in 0..n {
            for j in i..n {
                let (mut acc, mut acc2) = (0.0, 0.0);
                for p in 0..a.n_paths() {
                    let prod = a.value(p, i) * a.value(p, j);
                    acc += prod;
                    acc2 += prod * prod;
                }
                let mean = acc / a.n_paths() as f64;
                let var = (acc2 / a.n_paths() as f64 - mean * mean).max(0.0);
                let se = (var / a.n_paths() as f64).sqrt();
                let target = grid.times()[i].min(grid.times()[j]);
                assert!(
                    (mean - target).abs() <= 5.0 * se,
                    "entry ({i},{j}): {mean} vs {target} (se {se})"
                );
            }
        }
    }

    #[test]
    fn circulant_matches_cholesky_marginal() {
        // Two-sample KS on the endpoint marginal, 1% level.
        let h = 0.8;
        let a = sample_fbm_circulant(h, 2.0, 64, 3, 4000).unwrap();
        let grid = TimeGrid::uniform(2.0, 64).unwrap();
        let b = sample_fbm_cholesky(h, &grid, 4, 4000).unwrap();
        let last = grid.len() - 1;
        let d = ks_two_sample(&a.column(last), &b.column(last));
        let ne = (4000.0f64 * 4000.0) / 8000.0;
        let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
        let p = ks_q(lambda);
        assert!(p > 0.01, "KS rejected: D={d}, p={p}");
    }

    fn ks_two_sample(x: &[f64], y: &[f64]) -> f64 {
        let mut xs = x.to_vec();
        let mut ys = y.to_vec();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < xs.len() && j < ys.len() {
            if xs[i] <= ys[j] {
                i += 1;
            } else {
                j += 1;
            }
            let diff = (i as f64 / xs.len() as f64 - j as f64 / ys.len() as f64).abs();
            d = d.max(diff);
        }
        d
    }

    fn ks_q(lambda: f64) -> f64 {
        let mut sum = 0.0;
        for k in 1..=100 {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }

    #[test]
    fn circulant_needs_power_of_two() {
        assert!(matches!(
            sample_fbm_circulant(0.75, 1.0, 48, 0, 1),
            Err(FouError::Usage(_))
        ));
    }

    #[test]
    fn two_sided_anchors_zero_and_separates_halves() {
        let grid = TimeGrid::new(vec![-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
        let ens = sample_two_sided_fbm(0.75, &grid, 5, 2000).unwrap();
        for p in 0..ens.n_paths() {
            assert_eq!(ens.value(p, 2), 0.0);
        }
        // Halves are independent: cross-covariance E(Z_{-1} Z_1) ~ 0.
        let (mut acc, mut acc2) = (0.0, 0.0);
        for p in 0..ens.n_paths() {
            let prod = ens.value(p, 1) * ens.value(p, 3);
            acc += prod;
            acc2 += prod * prod;
        }
        let mean = acc / ens.n_paths() as f64;
        let var = (acc2 / ens.n_paths() as f64 - mean * mean).max(0.0);
        let se = (var / ens.n_paths() as f64).sqrt();
        assert!(mean.abs() <= 5.0 * se, "cross-cov {mean} vs se {se}");
        // Variance at t = -2 matches |t|^{2H}.
        let (mut acc, mut acc2) = (0.0, 0.0);
        for p in 0..ens.n_paths() {
            let v = ens.value(p, 0) * ens.value(p, 0);
            acc += v;
            acc2 += v * v;
        }
        let mean = acc / ens.n_paths() as f64;
        let var = (acc2 / ens.n_paths() as f64 - mean * mean).max(0.0);
        let se = (var / ens.n_paths() as f64).sqrt();
        let target = 2.0f64.powf(1.5);
        assert!((mean - target).abs() <= 5.0 * se);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(fbm_cov(1.0, 1.0, 2.0).is_err());
        assert!(fbm_cov(0.75, -1.0, 2.0).is_err());
        let grid = TimeGrid::new(vec![-1.0, 1.0]).unwrap();
        assert!(sample_fbm_cholesky(0.75, &grid, 0, 1).is_err());
        assert!(TimeGrid::new(vec![1.0, 1.0]).is_err());
        assert!(TimeGrid::new(vec![]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cov_symmetry_and_self_similarity(
            h in 0.05f64..0.95,
            s in 0.0f64..10.0,
            t in 0.0f64..10.0,
            c in 0.1f64..4.0,
        ) {
            let a = fbm_cov(h, s, t).unwrap();
            let b = fbm_cov(h, t, s).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            let scaled = fbm_cov(h, c * s, c * t).unwrap();
            let expect = c.powf(2.0 * h) * a;
            prop_assert!((scaled - expect).abs() <= 1e-10 * expect.abs().max(1e-12));
        }

        #[test]
        fn increment_cov_is_shift_invariant(
            h in 0.05f64..0.95,
            a in 0.0f64..5.0,
            len1 in 0.1f64..2.0,
            gap in 0.0f64..3.0,
            len2 in 0.1f64..2.0,
            shift in 0.0f64..5.0,
        ) {
            let w1 = (a, a + len1);
            let w2 = (a + len1 + gap, a + len1 + gap + len2);
            let base = fbm_increment_cov(h, w1, w2).unwrap();
            let moved = fbm_increment_cov(
                h,
                (w1.0 + shift, w1.1 + shift),
                (w2.0 + shift, w2.1 + shift),
            ).unwrap();
            // Stationary increments: scale tolerance by window size.
            let scale = base.abs().max(len1 * len2).max(1e-9);
            prop_assert!((base - moved).abs() <= 1e-7 * scale);
        }

        #[test]
        fn disjoint_increment_sign_follows_regime(
            gap in 0.05f64..3.0,
            len in 0.1f64..2.0,
        ) {
            let w1 = (len + gap, 2.0 * len + gap);
            let w2 = (0.0, len);
            prop_assert!(fbm_increment_cov(0.75, w1, w2).unwrap() > 0.0);
            prop_assert!(fbm_increment_cov(0.25, w1, w2).unwrap() < 0.0);
        }
    }
}
