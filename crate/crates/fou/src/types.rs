use crate::error::{FouError, Result};

/// Model parameters shared across the process family.
///
/// `hurst` is the self-similarity index H of the driving fractional
/// Brownian motion, `alpha` the mean-reversion rate of the Langevin
/// equations driven by FBM or used in the time change, and `gamma` the
/// mean-reversion rate of the second-kind equation (whose driver is
/// pinned to alpha = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub hurst: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(hurst: f64, alpha: f64, gamma: f64) -> Result<Self> {
        let p = ModelParams { hurst, alpha, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.0 && self.hurst < 1.0) || !self.hurst.is_finite() {
            return Err(FouError::InvalidParameter {
                name: "hurst",
                value: self.hurst,
                constraint: "0 < H < 1",
            });
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(FouError::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                constraint: "alpha > 0",
            });
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(FouError::InvalidParameter {
                name: "gamma",
                value: self.gamma,
                constraint: "gamma > 0",
            });
        }
        Ok(())
    }

    /// Kernel-based analytics assume the long-memory regime.
    pub fn require_long_memory(&self) -> Result<()> {
        if self.hurst <= 0.5 {
            return Err(FouError::InvalidParameter {
                name: "hurst",
                value: self.hurst,
                constraint: "1/2 < H < 1",
            });
        }
        Ok(())
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { hurst: 0.75, alpha: 1.0, gamma: 1.0 }
    }
}

/// Strictly increasing, finite evaluation times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(FouError::Usage("time grid must be nonempty".into()));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(FouError::Usage(format!(
                    "time grid must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(FouError::Usage("time grid entries must be finite".into()));
        }
        Ok(TimeGrid { times })
    }

    /// Uniform grid 0, dt, 2dt, ..., t_max with `steps` intervals
    /// (steps + 1 points).
    pub fn uniform(t_max: f64, steps: usize) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(FouError::InvalidParameter {
                name: "t_max",
                value: t_max,
                constraint: "t_max > 0",
            });
        }
        if steps == 0 {
            return Err(FouError::Usage("steps must be at least 1".into()));
        }
        let times = (0..=steps).map(|i| t_max * i as f64 / steps as f64).collect();
        TimeGrid::new(times)
    }

    /// Uniform grid dt, 2dt, ..., t_max excluding the origin.
    pub fn uniform_positive(t_max: f64, steps: usize) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(FouError::InvalidParameter {
                name: "t_max",
                value: t_max,
                constraint: "t_max > 0",
            });
        }
        if steps == 0 {
            return Err(FouError::Usage("steps must be at least 1".into()));
        }
        let times = (1..=steps).map(|i| t_max * i as f64 / steps as f64).collect();
        TimeGrid::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.times[0]
    }

    pub fn last(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Index of the grid node equal to `t` up to a relative tolerance.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let tol = 1e-9 * self.last().abs().max(1.0);
        self.times
            .iter()
            .position(|&x| (x - t).abs() <= tol)
            .ok_or_else(|| FouError::Usage(format!("time {t} is not on the grid")))
    }

    /// Constant step when the grid is uniform (within a relative tolerance).
    pub fn uniform_step(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        let dt = self.times[1] - self.times[0];
        let ok = self
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1e-300));
        ok.then_some(dt)
    }
}

/// Which process an ensemble or path realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcessKind {
    /// Fractional Brownian motion Z.
    Fbm,
    /// Stationary Doob transform X of FBM.
    DoobTransform,
    /// Stationary-increment driver Y extracted from the Doob transform.
    Driver,
    /// Fractional Ornstein-Uhlenbeck process of the first kind
    /// (Langevin driven by FBM).
    Fou1,
    /// Fractional Ornstein-Uhlenbeck process of the second kind
    /// (Langevin driven by Y with unit alpha).
    Fou2,
    /// Classical Ornstein-Uhlenbeck process (H = 1/2 reduction).
    Ou,
}

impl ProcessKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProcessKind::Fbm => "fbm",
            ProcessKind::DoobTransform => "doob",
            ProcessKind::Driver => "driver",
            ProcessKind::Fou1 => "fou1",
            ProcessKind::Fou2 => "fou2",
            ProcessKind::Ou => "ou",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fbm" => Ok(ProcessKind::Fbm),
            "doob" => Ok(ProcessKind::DoobTransform),
            "driver" => Ok(ProcessKind::Driver),
            "fou1" => Ok(ProcessKind::Fou1),
            "fou2" => Ok(ProcessKind::Fou2),
            "ou" => Ok(ProcessKind::Ou),
            _ => Err(FouError::Usage(format!(
                "unknown process '{s}' (expected fbm, doob, driver, fou1, fou2, ou)"
            ))),
        }
    }
}

/// One realized path on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl SamplePath {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(FouError::Usage(format!(
                "path has {} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        Ok(SamplePath { grid, values })
    }
}

/// A batch of paths sharing one grid, flat path-major storage.
///
/// Regeneration contract: identical (kind, params, grid, seed, count)
/// reproduce bit-identical values; each path draws from its own
/// counter-based stream keyed by (seed, path index), so the result is
/// independent of scheduling.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub kind: ProcessKind,
    pub params: ModelParams,
    pub grid: TimeGrid,
    pub seed: u64,
    values: Vec<f64>,
    n_paths: usize,
    /// Human-readable notes from the sampler (jitter applied, method
    /// fallback). Surfaced by the CLI on stderr.
    pub diagnostics: Vec<String>,
}

impl Ensemble {
    pub fn from_paths(
        kind: ProcessKind,
        params: ModelParams,
        grid: TimeGrid,
        seed: u64,
        paths: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n_paths = paths.len();
        if n_paths == 0 {
            return Err(FouError::Usage("ensemble must contain at least one path".into()));
        }
        let n = grid.len();
        let mut values = Vec::with_capacity(n_paths * n);
        for p in &paths {
            if p.len() != n {
                return Err(FouError::Usage(format!(
                    "path has {} values for {} grid points",
                    p.len(),
                    n
                )));
            }
            values.extend_from_slice(p);
        }
        Ok(Ensemble {
            kind,
            params,
            grid,
            seed,
            values,
            n_paths,
            diagnostics: Vec::new(),
        })
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn n_times(&self) -> usize {
        self.grid.len()
    }

    pub fn path(&self, i: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn value(&self, path: usize, idx: usize) -> f64 {
        self.values[path * self.grid.len() + idx]
    }

    /// Column of values across paths at one grid index.
    pub fn column(&self, idx: usize) -> Vec<f64> {
        (0..self.n_paths).map(|p| self.value(p, idx)).collect()
    }
}

/// Finite realization window for the improper integrals over
/// (-infinity, 0] that define stationary initial values and the
/// stationary second-kind covariance.
///
/// `lower_cutoff` is where the infinite lower limit is truncated. With
/// the `auto` constructor it is `NEG_INFINITY`, which instructs each
/// consumer to solve its own analytic tail bound for the smallest
/// cutoff meeting `tolerance`; a `fixed` cutoff is instead validated
/// against that bound and rejected when the discarded mass can exceed
/// `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub lower_cutoff: f64,
    pub tolerance: f64,
}

impl TruncationPolicy {
    /// Derive the cutoff from the consumer's tail bound.
    pub fn auto(tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0) || !tolerance.is_finite() {
            return Err(FouError::InvalidParameter {
                name: "tolerance",
                value: tolerance,
                constraint: "tolerance > 0",
            });
        }
        Ok(TruncationPolicy { lower_cutoff: f64::NEG_INFINITY, tolerance })
    }

    /// Explicit cutoff; consumers verify their tail bound at this point
    /// and reject the policy if it exceeds `tolerance`.
    pub fn fixed(lower_cutoff: f64, tolerance: f64) -> Result<Self> {
        if !(lower_cutoff < 0.0) || !lower_cutoff.is_finite() {
            return Err(FouError::InvalidParameter {
                name: "lower_cutoff",
                value: lower_cutoff,
                constraint: "lower_cutoff < 0 and finite",
            });
        }
        if !(tolerance > 0.0) || !tolerance.is_finite() {
            return Err(FouError::InvalidParameter {
                name: "tolerance",
                value: tolerance,
                constraint: "tolerance > 0",
            });
        }
        Ok(TruncationPolicy { lower_cutoff, tolerance })
    }

    pub fn is_auto(&self) -> bool {
        self.lower_cutoff == f64::NEG_INFINITY
    }

    /// Final cutoff given the consumer's smallest admissible value
    /// (negative). Auto policies adopt it; fixed policies must already
    /// be at least as deep.
    pub fn resolve_cutoff(&self, required: f64) -> Result<f64> {
        if self.is_auto() {
            return Ok(required);
        }
        if self.lower_cutoff <= required {
            Ok(self.lower_cutoff)
        } else {
            Err(FouError::Config(format!(
                "truncation cutoff {:.6} keeps tail mass above tolerance {:.3e}; needs cutoff <= {:.6}",
                self.lower_cutoff, self.tolerance, required
            )))
        }
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { lower_cutoff: f64::NEG_INFINITY, tolerance: 1e-8 }
    }
}

/// Symmetric covariance matrix tied to its evaluation times.
#[derive(Debug, Clone)]
pub struct CovMatrix {
    pub times: Vec<f64>,
    data: Vec<f64>,
    n: usize,
}

impl CovMatrix {
    /// Builds from the upper triangle of `f(t_i, t_j)`; entries are
    /// mirrored so symmetry holds exactly.
    pub fn from_fn(times: &[f64], mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let n = times.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(times[i], times[j]);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        CovMatrix { times: times.to_vec(), data, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.n)
            .map(|i| self.get(i, i))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
