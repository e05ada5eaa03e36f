//! Command-line front end: simulation, covariance tabulation, and the
//! verification experiments, with reproducible run directories.
//!
//! Conventions:
//!
//! * `--out` ending in `.csv` or `.svg` writes that single file; any
//!   other `--out` (default `runs`) is a root directory that receives
//!   `<UTC stamp>-<kind>/` with `manifest.txt`, tables, and
//!   `summary.txt`.
//! * Values resolve as flags over `--config` entries over built-in
//!   defaults (hurst 0.75, alpha 1, gamma 1, seed 0). Config files are
//!   flat `key = value` lines; a manifest replays via `--config`.
//! * Report CSVs use the columns `metric,estimate,std_error,target,z`;
//!   z is SE-normalized when the metric is statistical and
//!   target-relative when it is deterministic.
//! * Exit codes: 0 done, 1 failed verification checks under `--strict`
//!   (or a numerical failure), 2 usage and configuration errors.

mod commands;
mod config;
mod io;
mod manifest;
mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "fou",
    version,
    about = "Fractional Ornstein-Uhlenbeck processes: simulation, analytics, experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample process paths and write them as CSV (path_id,t,value)
    Simulate(SimulateArgs),
    /// Tabulate an analytic covariance curve (x,value,error_estimate)
    Cov(CovArgs),
    /// Tabulate the driver's moving-average kernel and its constants
    Kernel(KernelArgs),
    /// Run a verification experiment and write its report CSV
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Render a CSV table as a static SVG plot
    Render(RenderArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Hurst index in (0,1)
    #[arg(long)]
    hurst: Option<f64>,
    /// Mean-reversion rate of the first-kind process and the transform
    #[arg(long)]
    alpha: Option<f64>,
    /// Mean-reversion rate of the second-kind process
    #[arg(long)]
    gamma: Option<f64>,
    /// Base RNG seed; path p draws from stream p
    #[arg(long)]
    seed: Option<u64>,
    /// Flat key = value config file (flags win over its entries)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output .csv/.svg file, or a runs root directory (default: runs)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 1 when a verification check fails
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// fbm, fbm-circulant, doob, driver, fou1, or fou2
    #[arg(long)]
    process: Option<String>,
    /// Grid endpoint; the grid is 0, t_max/steps, ..., t_max
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid steps
    #[arg(long)]
    steps: Option<usize>,
    /// Number of sample paths
    #[arg(long)]
    paths: Option<usize>,
    /// Internal quadrature subintervals per grid step (driver/fou1/fou2)
    #[arg(long)]
    refinement: Option<usize>,
    /// fou2 construction: langevin-on-y or direct-transform
    #[arg(long)]
    method: Option<String>,
    /// fou1 start: stationary or zero
    #[arg(long)]
    init: Option<String>,
    /// History truncation tail tolerance (stationary init, fou2)
    #[arg(long)]
    trunc_tol: Option<f64>,
    /// Fixed negative history cutoff; derived from trunc_tol if absent
    #[arg(long)]
    trunc_cutoff: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CovArgs {
    /// ou, doob, fou2, fou1-asymptotic, driver-var, fgn, driver-autocov
    #[arg(long)]
    formula: Option<String>,
    /// Abscissa grid start:end:step (integer lags for fgn/driver-autocov)
    #[arg(long)]
    tau_grid: Option<String>,
    /// Partial-sum order of the fou1 asymptotic expansion
    #[arg(long)]
    terms: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct KernelArgs {
    /// Abscissa grid start:end:step; must start above 0
    #[arg(long)]
    tau_grid: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Scaled driver covariance against its Brownian limit
    WeakConvergence(WeakArgs),
    /// Log-slope of an analytic covariance curve vs the known rate
    DecayRate(DecayArgs),
    /// Shift-invariance z-test of ensemble covariances
    Stationarity(StationarityArgs),
    /// Short/long-range classification of an autocovariance sequence
    RangeDependence(RangeArgs),
    /// Path regularity exponent from increment maxima across scales
    Holder(HolderArgs),
}

#[derive(Args)]
struct WeakArgs {
    /// Increasing scales, e.g. 4,16,64,256
    #[arg(long)]
    a: Option<String>,
    /// Probe pairs s:t, e.g. 1:2,0.5:3
    #[arg(long)]
    probes: Option<String>,
    /// quadrature or monte-carlo
    #[arg(long)]
    mode: Option<String>,
    /// Paths per cell in monte-carlo mode
    #[arg(long)]
    paths: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct DecayArgs {
    /// Curve to fit: doob or fou2
    #[arg(long)]
    process: Option<String>,
    /// Fit window lo:hi in lag time
    #[arg(long)]
    window: Option<String>,
    /// Curve grid start:end:step; defaults to the window at step 0.25
    #[arg(long)]
    tau_grid: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct StationarityArgs {
    /// Ensemble to test: doob, fou1, or fou2
    #[arg(long)]
    process: Option<String>,
    /// Covariance lag
    #[arg(long)]
    lag: Option<f64>,
    /// Comma-separated nonnegative shifts
    #[arg(long)]
    shifts: Option<String>,
    /// Number of sample paths
    #[arg(long)]
    paths: Option<usize>,
    /// Internal quadrature subintervals per grid step
    #[arg(long)]
    refinement: Option<usize>,
    /// fou1 start: stationary or zero
    #[arg(long)]
    init: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct RangeArgs {
    /// Autocovariance sequence: fgn or driver
    #[arg(long)]
    source: Option<String>,
    /// Largest lag of the sequence
    #[arg(long)]
    max_lag: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct HolderArgs {
    /// Path source: fbm or driver
    #[arg(long)]
    process: Option<String>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Strictly increasing window sizes in grid steps, e.g. 1,2,4,8,16,32
    #[arg(long)]
    scales: Option<String>,
    /// Internal quadrature subintervals per grid step (driver)
    #[arg(long)]
    refinement: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct RenderArgs {
    /// Input CSV table (plain dialect, header line required)
    #[arg(long)]
    table: PathBuf,
    /// x column name or 0-based index
    #[arg(long)]
    x_col: Option<String>,
    /// y column name or 0-based index
    #[arg(long)]
    y_col: Option<String>,
    /// Logarithmic x axis
    #[arg(long)]
    log_x: bool,
    /// Logarithmic y axis
    #[arg(long)]
    log_y: bool,
    #[command(flatten)]
    common: CommonArgs,
}

/// Parse argv, run the command, report, and map errors to exit codes.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli.command) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            match outcome.checks {
                Some(false) if outcome.strict => 1,
                _ => 0,
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
