//! Subcommand implementations: resolve settings, compute, and emit
//! manifest plus tables into a run directory (or a single file when
//! `--out` names a .csv/.svg path).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::config::{
    parse_grid, parse_list, parse_probes, parse_window, resolve, resolve_opt, resolve_str,
    FileConfig,
};
use super::manifest::{utc_now, Manifest};
use super::svg::PlotSpec;
use super::{io, svg};
use super::{
    Command, CommonArgs, CovArgs, DecayArgs, ExperimentCmd, HolderArgs, KernelArgs, RangeArgs,
    RenderArgs, SimulateArgs, StationarityArgs, WeakArgs,
};
use crate::analytics::{
    doob_cov, doob_decay_rate, driver_autocov, driver_var, fou1_cov_asymptotic, fou2_cov,
    fou2_decay_rate, ou_cov, weak_limit_constants, KernelSpec, QuadConfig,
};
use crate::error::{FouError, Result};
use crate::estimation::{
    decay_rate_fit, holder_exponent, range_dependence_diagnostic, stationarity_test,
    weak_convergence_experiment, RangeClass, WeakMode,
};
use crate::fbm::{fgn_autocov, sample_fbm_cholesky, sample_fbm_circulant};
use crate::transforms::{
    doob_transform, driver_process, fou1_path, fou2_path, Fou1Init, Fou2Method, PathConfig,
};
use crate::types::{Ensemble, ModelParams, SamplePath, TimeGrid, TruncationPolicy};

pub struct Outcome {
    pub lines: Vec<String>,
    pub checks: Option<bool>,
    pub strict: bool,
}

pub fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Simulate(args) => simulate(args),
        Command::Cov(args) => cov(args),
        Command::Kernel(args) => kernel(args),
        Command::Experiment(ExperimentCmd::WeakConvergence(args)) => weak(args),
        Command::Experiment(ExperimentCmd::DecayRate(args)) => decay(args),
        Command::Experiment(ExperimentCmd::Stationarity(args)) => stationarity(args),
        Command::Experiment(ExperimentCmd::RangeDependence(args)) => range(args),
        Command::Experiment(ExperimentCmd::Holder(args)) => holder(args),
        Command::Render(args) => render(args),
    }
}

struct Ctx {
    params: ModelParams,
    seed: u64,
    out: PathBuf,
    strict: bool,
    cfg: FileConfig,
}

impl Ctx {
    fn resolve(common: &CommonArgs) -> Result<Ctx> {
        let cfg = match &common.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::empty(),
        };
        let hurst = resolve(common.hurst, &cfg, "hurst", 0.75)?;
        let alpha = resolve(common.alpha, &cfg, "alpha", 1.0)?;
        let gamma = resolve(common.gamma, &cfg, "gamma", 1.0)?;
        let seed = resolve(common.seed, &cfg, "seed", 0u64)?;
        let params = ModelParams::new(hurst, alpha, gamma)?;
        let out = common.out.clone().unwrap_or_else(|| PathBuf::from("runs"));
        Ok(Ctx { params, seed, out, strict: common.strict, cfg })
    }

    fn push_params(&self, man: &mut Manifest) {
        man.push("hurst", self.params.hurst);
        man.push("alpha", self.params.alpha);
        man.push("gamma", self.params.gamma);
        man.push("seed", self.seed);
    }
}

fn quad_from_cfg(cfg: &FileConfig) -> Result<QuadConfig> {
    let d = QuadConfig::default();
    Ok(QuadConfig {
        rel_tol: resolve(None, cfg, "quad_rel_tol", d.rel_tol)?,
        abs_tol: resolve(None, cfg, "quad_abs_tol", d.abs_tol)?,
        max_subdivisions: resolve(None, cfg, "quad_max_subdivisions", d.max_subdivisions)?,
    })
}

fn push_quad(man: &mut Manifest, qc: &QuadConfig) {
    man.push("quad_rel_tol", qc.rel_tol);
    man.push("quad_abs_tol", qc.abs_tol);
    man.push("quad_max_subdivisions", qc.max_subdivisions);
}

fn trunc_from(cutoff: Option<f64>, tol: f64) -> Result<TruncationPolicy> {
    match cutoff {
        Some(c) => TruncationPolicy::fixed(c, tol),
        None => TruncationPolicy::auto(tol),
    }
}

enum Sink {
    File(PathBuf),
    Dir(PathBuf),
}

/// Routes outputs: a `.csv`/`.svg` target takes the primary file alone;
/// anything else is a runs root receiving a stamped directory with
/// manifest, tables, and summary.
struct Emitter {
    created: String,
    sink: Sink,
}

impl Emitter {
    fn new(out: &Path, kind: &str) -> Result<Emitter> {
        let (created, stamp) = utc_now();
        let ext = out.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
        let sink = if ext == "csv" || ext == "svg" {
            if let Some(parent) = out.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent).map_err(|e| {
                        FouError::Config(format!("cannot create {}: {e}", parent.display()))
                    })?;
                }
            }
            Sink::File(out.to_path_buf())
        } else {
            Sink::Dir(io::create_run_dir(out, kind, &stamp)?)
        };
        Ok(Emitter { created, sink })
    }

    fn write_primary(&self, name: &str, content: &str) -> Result<PathBuf> {
        let path = match &self.sink {
            Sink::File(p) => p.clone(),
            Sink::Dir(d) => d.join(name),
        };
        io::write_atomic(&path, content)?;
        Ok(path)
    }

    /// Secondary files exist only in directory mode.
    fn write_extra(&self, name: &str, content: &str) -> Result<Option<PathBuf>> {
        match &self.sink {
            Sink::File(_) => Ok(None),
            Sink::Dir(d) => {
                let path = d.join(name);
                io::write_atomic(&path, content)?;
                Ok(Some(path))
            }
        }
    }

    /// Writes manifest and summary in directory mode and returns the
    /// stdout report lines.
    fn finish(
        &self,
        man: &Manifest,
        body: &[String],
        pass: Option<bool>,
        started: Instant,
        mut written: Vec<PathBuf>,
    ) -> Result<Vec<String>> {
        if let Sink::Dir(dir) = &self.sink {
            let man_path = dir.join("manifest.txt");
            io::write_atomic(&man_path, &man.render(&self.created))?;
            written.insert(0, man_path);
            let mut text = String::new();
            for line in body {
                text.push_str(line);
                text.push('\n');
            }
            if let Some(p) = pass {
                text.push_str(if p { "result = PASS\n" } else { "result = FAIL\n" });
            }
            let _ = writeln!(text, "elapsed_ms = {}", started.elapsed().as_millis());
            for w in &written {
                let _ = writeln!(text, "wrote = {}", w.display());
            }
            io::write_atomic(&dir.join("summary.txt"), &text)?;
        }
        let mut lines = body.to_vec();
        if let Some(p) = pass {
            lines.push(if p { "result: PASS" } else { "result: FAIL" }.to_string());
        }
        for w in &written {
            lines.push(format!("wrote {}", w.display()));
        }
        Ok(lines)
    }
}

/// SE-normalized when a standard error exists, target-relative for
/// deterministic metrics.
fn z_value(estimate: f64, std_error: f64, target: f64) -> f64 {
    if std_error > 0.0 {
        (estimate - target) / std_error
    } else if target != 0.0 {
        (estimate - target) / target
    } else {
        estimate - target
    }
}

fn report_table() -> io::Table {
    io::Table::new(&["metric", "estimate", "std_error", "target", "z"])
}

fn push_metric(table: &mut io::Table, metric: &str, estimate: f64, std_error: f64, target: f64) {
    let z = z_value(estimate, std_error, target);
    table.push_row(vec![
        metric.to_string(),
        io::fmt_float(estimate),
        io::fmt_float(std_error),
        io::fmt_float(target),
        io::fmt_float(z),
    ]);
}

fn int_lag(x: f64) -> Result<u64> {
    let r = x.round();
    if (x - r).abs() > 1e-9 || r < 0.0 {
        return Err(FouError::Usage(format!("lag {x} is not a nonnegative integer")));
    }
    Ok(r as u64)
}

fn parse_method(s: &str) -> Result<Fou2Method> {
    match s {
        "langevin-on-y" => Ok(Fou2Method::LangevinOnY),
        "direct-transform" => Ok(Fou2Method::DirectTransform),
        _ => Err(FouError::Usage(format!(
            "unknown method '{s}' (expected langevin-on-y or direct-transform)"
        ))),
    }
}

fn parse_init(s: &str, trunc: TruncationPolicy) -> Result<Fou1Init> {
    match s {
        "zero" => Ok(Fou1Init::Zero),
        "stationary" => Ok(Fou1Init::StationaryTruncated(trunc)),
        _ => Err(FouError::Usage(format!("unknown init '{s}' (expected stationary or zero)"))),
    }
}

fn class_name(c: RangeClass) -> &'static str {
    match c {
        RangeClass::ShortRange => "ShortRange",
        RangeClass::LongRange => "LongRange",
        RangeClass::Inconclusive => "Inconclusive",
    }
}

fn class_code(c: RangeClass) -> f64 {
    match c {
        RangeClass::ShortRange => 0.0,
        RangeClass::LongRange => 1.0,
        RangeClass::Inconclusive => 2.0,
    }
}

fn ensemble_csv(ens: &Ensemble) -> String {
    let mut csv = String::with_capacity(ens.n_paths() * ens.n_times() * 48 + 16);
    csv.push_str("path_id,t,value\n");
    let times = ens.grid.times();
    for p in 0..ens.n_paths() {
        let row = ens.path(p);
        for (j, &t) in times.iter().enumerate() {
            let _ = writeln!(csv, "{p},{},{}", io::fmt_float(t), io::fmt_float(row[j]));
        }
    }
    csv
}

fn simulate(args: SimulateArgs) -> Result<Outcome> {
    let started = Instant::now();
    let ctx = Ctx::resolve(&args.common)?;
    let process = resolve_str(args.process, &ctx.cfg, "process", "fbm");
    let t_max = resolve(args.t_max, &ctx.cfg, "t_max", 10.0)?;
    let steps = resolve(args.steps, &ctx.cfg, "steps", 512usize)?;
    let paths = resolve(args.paths, &ctx.cfg, "paths", 1000usize)?;
    let refinement = resolve(args.refinement, &ctx.cfg, "refinement", 8usize)?;
    let method_s = resolve_str(args.method, &ctx.cfg, "method", "langevin-on-y");
    let init_s = resolve_str(args.init, &ctx.cfg, "init", "stationary");
    let trunc_tol = resolve(args.trunc_tol, &ctx.cfg, "trunc_tol", 1e-8)?;
    let trunc_cutoff = resolve_opt(args.trunc_cutoff, &ctx.cfg, "trunc_cutoff")?;
    let method = parse_method(&method_s)?;
    let trunc = trunc_from(trunc_cutoff, trunc_tol)?;
    let init = parse_init(&init_s, trunc)?;

    let grid = TimeGrid::uniform(t_max, steps)?;
    let pc = PathConfig { refinement };
    let ens = match process.as_str() {
        "fbm" => sample_fbm_cholesky(ctx.params.hurst, &grid, ctx.seed, paths)?,
        "fbm-circulant" => sample_fbm_circulant(ctx.params.hurst, t_max, steps, ctx.seed, paths)?,
        "doob" => doob_transform(&ctx.params, &grid, ctx.seed, paths)?,
        "driver" => driver_process(&ctx.params, &grid, ctx.seed, paths, &pc)?,
        "fou1" => fou1_path(&ctx.params, &grid, ctx.seed, paths, &init, &pc)?,
        "fou2" => fou2_path(&ctx.params, &grid, ctx.seed, paths, method, &trunc, &pc)?,
        other => {
            return Err(FouError::Usage(format!(
                "unknown process '{other}' (expected fbm, fbm-circulant, doob, driver, fou1, fou2)"
            )))
        }
    };

    let mut man = Manifest::new("simulate");
    man.push("process", &process);
    ctx.push_params(&mut man);
    man.push("t_max", t_max);
    man.push("steps", steps);
    man.push("paths", paths);
    let uses_quadrature = matches!(process.as_str(), "driver" | "fou1" | "fou2");
    if uses_quadrature {
        man.push("refinement", refinement);
    }
    if process == "fou2" {
        man.push("method", &method_s);
    }
    if process == "fou1" {
        man.push("init", &init_s);
    }
    if process == "fou2" || (process == "fou1" && init_s == "stationary") {
        man.push("trunc_tol", trunc_tol);
        if let Some(c) = trunc_cutoff {
            man.push("trunc_cutoff", c);
        }
    }

    let em = Emitter::new(&ctx.out, "simulate")?;
    let written = vec![em.write_primary("paths.csv", &ensemble_csv(&ens))?];
    let mut body = vec![format!(
        "simulate {process}: {} paths x {} points, hurst {}, alpha {}, gamma {}, seed {}",
        ens.n_paths(),
        ens.n_times(),
        ctx.params.hurst,
        ctx.params.alpha,
        ctx.params.gamma,
        ctx.seed
    )];
    body.extend(ens.diagnostics.iter().map(|d| format!("note: {d}")));
    let lines = em.finish(&man, &body, None, started, written)?;
    Ok(Outcome { lines, checks: None, strict: ctx.strict })
}

fn cov(args: CovArgs) -> Result<Outcome> {
    let started = Instant::now();
    let ctx = Ctx::resolve(&args.common)?;
    let formula = resolve_str(args.formula, &ctx.cfg, "formula", "doob");
    let tau_spec = resolve_str(args.tau_grid, &ctx.cfg, "tau_grid", "0:20:0.1");
    let terms = resolve(args.terms, &ctx.cfg, "terms", 2usize)?;
    let taus = parse_grid(&tau_spec)?;
    let qc = quad_from_cfg(&ctx.cfg)?;
    let trunc_tol = resolve(None, &ctx.cfg, "trunc_tol", 1e-8)?;
    let trunc = trunc_from(resolve_opt(None, &ctx.cfg, "trunc_cutoff")?, trunc_tol)?;
    let params = &ctx.params;

    let known = ["ou", "doob", "fou2", "fou1-asymptotic", "driver-var", "fgn", "driver-autocov"];
    if !known.contains(&formula.as_str()) {
        return Err(FouError::Usage(format!(
            "unknown formula '{formula}' (expected one of {})",
            known.join(", ")
        )));
    }
    let rows: Vec<(f64, f64, f64)> = taus
        .par_iter()
        .map(|&x| -> Result<(f64, f64, f64)> {
            let (v, e) = match formula.as_str() {
                "ou" => (ou_cov(params.alpha, 0.0, x)?, 0.0),
                "doob" => (doob_cov(params, 0.0, x)?, 0.0),
                "fou2" => {
                    let r = fou2_cov(params, 0.0, x, &trunc, &qc)?;
                    (r.value, r.error)
                }
                "fou1-asymptotic" => (fou1_cov_asymptotic(params, x, terms)?, 0.0),
                "driver-var" => {
                    let r = driver_var(params, x, &qc)?;
                    (r.value, r.error)
                }
                "fgn" => (fgn_autocov(params.hurst, int_lag(x)?)?, 0.0),
                "driver-autocov" => {
                    let r = driver_autocov(params, int_lag(x)?, &qc)?;
                    (r.value, r.error)
                }
                _ => unreachable!(),
            };
            Ok((x, v, e))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = io::Table::new(&["x", "value", "error_estimate"]);
    for (x, v, e) in &rows {
        table.push_row(vec![io::fmt_float(*x), io::fmt_float(*v), io::fmt_float(*e)]);
    }

    let mut man = Manifest::new("cov");
    man.push("formula", &formula);
    ctx.push_params(&mut man);
    man.push("tau_grid", &tau_spec);
    if formula == "fou1-asymptotic" {
        man.push("terms", terms);
    }
    if matches!(formula.as_str(), "fou2" | "driver-var" | "driver-autocov") {
        push_quad(&mut man, &qc);
    }
    if formula == "fou2" {
        man.push("trunc_tol", trunc_tol);
    }

    let em = Emitter::new(&ctx.out, "cov")?;
    let written = vec![em.write_primary("cov.csv", &table.to_csv())?];
    let body = vec![format!(
        "cov {formula}: {} points on [{}, {}], hurst {}, alpha {}, gamma {}",
        taus.len(),
        taus[0],
        taus[taus.len() - 1],
        params.hurst,
        params.alpha,
        params.gamma
    )];
    let lines = em.finish(&man, &body, None, started, written)?;
    Ok(Outcome { lines, checks: None, strict: ctx.strict })
}

fn kernel(args: KernelArgs) -> Result<Outcome> {
    let started = Instant::now();
    let ctx = Ctx::resolve(&args.common)?;
    let tau_spec = resolve_str(args.tau_grid, &ctx.cfg, "tau_grid", "0.05:10:0.05");
    let taus = parse_grid(&tau_spec)?;
    if !(taus[0] > 0.0) {
        return Err(FouError::Usage(
            "kernel grid must start above 0; the kernel diverges at the origin".into(),
        ));
    }
    let spec = KernelSpec::for_params(&ctx.params)?;
    let wl = weak_limit_constants(&ctx.params)?;
    let integral = spec.integral()?;

    let mut table = io::Table::new(&["x", "value", "error_estimate"]);
    for &x in &taus {
        table.push_row(vec![io::fmt_float(x), io::fmt_float(spec.eval(x)?), io::fmt_float(0.0)]);
    }
    let mut consts = io::Table::new(&["name", "value"]);
    for (name, v) in [
        ("coeff", spec.coeff),
        ("theta", spec.theta),
        ("beta", spec.beta),
        ("kernel_integral", integral),
        ("kappa", wl.kappa),
        ("sigma", wl.sigma),
    ] {
        consts.push_row(vec![name.to_string(), io::fmt_float(v)]);
    }

    let mut man = Manifest::new("kernel");
    ctx.push_params(&mut man);
    man.push("tau_grid", &tau_spec);

    let em = Emitter::new(&ctx.out, "kernel")?;
    let mut written = vec![em.write_primary("kernel.csv", &table.to_csv())?];
    if let Some(p) = em.write_extra("constants.csv", &consts.to_csv())? {
        written.push(p);
    }
    let body = vec![
        format!(
            "kernel: hurst {}, alpha {}, coeff {:.6}, decay theta {:.6}, shape beta {:.6}",
            ctx.params.hurst, ctx.params.alpha, spec.coeff, spec.theta, spec.beta
        ),
        format!("kappa {:.10}, sigma {:.10}, kernel integral {:.10}", wl.kappa, wl.sigma, integral),
    ];
    let lines = em.finish(&man, &body, None, started, written)?;
    Ok(Outcome { lines, checks: None, strict: ctx.strict })
}

fn weak(args: WeakArgs) -> Result<Outcome> {
    let started = Instant::now();
    let ctx = Ctx::resolve(&args.common)?;
    let a_spec = resolve_str(args.a, &ctx.cfg, "a", "4,16,64,256");
    let probes_spec = resolve_str(args.probes, &ctx.cfg, "probes", "1:2,0.5:3");
    let mode_s = resolve_str(args.mode, &ctx.cfg, "mode", "quadrature");
    let paths = resolve(args.paths, &ctx.cfg, "paths", 10_000usize)?;
    let a = parse_list::<f64>(&a_spec, "a")?;
    let probes = parse_probes(&probes_spec)?;
    let mode = match mode_s.as_str() {
        "quadrature" => WeakMode::Quadrature,
        "monte-carlo" => WeakMode::MonteCarlo { seed: ctx.seed, count: paths },
        _ => {
            return Err(FouError::Usage(format!(
                "unknown mode '{mode_s}' (expected quadrature or monte-carlo)"
            )))
        }
    };

    let report = weak_convergence_experiment(&ctx.params, &a, &probes, mode)?;

    let mut table = report_table();
    let mut body = vec![format!("weak convergence ({mode_s}): kappa {:.10}", report.kappa)];
    for probe in &report.probes {
        for row in &probe.rows {
            push_metric(
                &mut table,
                &format!("cov[s={},t={},a={}]", probe.s, probe.t, row.a),
                row.estimate,
                row.std_error,
                row.target,
            );
        }
        push_metric(
            &mut table,
            &format!("final_rel_error[s={},t={}]", probe.s, probe.t),
            probe.final_relative_error,
            0.0,
            0.05,
        );
        body.push(format!(
            "probe ({},{}): errors decreasing {}, final relative error {:.4}, {}",
            probe.s,
            probe.t,
            if probe.errors_decreasing { "yes" } else { "no" },
            probe.final_relative_error,
            if probe.pass { "PASS" } else { "FAIL" }
        ));
    }
    for check in &report.normality {
        push_metric(&mut table, &format!("skewness_z[a={}]", check.a), check.skew_z, 1.0, 0.0);
        push_metric(&mut table, &format!("kurtosis_z[a={}]", check.a), check.kurtosis_z, 1.0, 0.0);
        body.push(format!(
            "normality a={}: skew z {:.3}, kurtosis z {:.3}, {}",
            check.a,
            check.skew_z,
            check.kurtosis_z,
            if check.pass { "PASS" } else { "FAIL" }
        ));
    }

    let mut man = Manifest::new("weak-convergence");
    ctx.push_params(&mut man);
    man.push("mode", &mode_s);
    man.push("a", &a_spec);
    man.push("probes", &probes_spec);
    if mode_s == "monte-carlo" {
        man.push("paths", paths);
    }

    let em = Emitter::new(&ctx.out, "weak-convergence")?;
    let written = vec![em.write_primary("report.csv", &table.to_csv())?];
    let lines = em.finish(&man, &body, Some(report.pass), started, written)?;
    Ok(Outcome { lines, checks: Some(report.pass), strict: ctx.strict })
}

fn decay(args: DecayArgs) -> Result<Outcome> {
    let started = Instant::now();
    let ctx = Ctx::resolve(&args.common)?;
    let process = resolve_str(args.process, &ctx.cfg, "process", "doob");
    let window_spec = resolve_str(args.window, &ctx.cfg, "window", "5:15");
    let window = parse_window(&window_spec)?;
    let default_grid = format!("{}:{}:0.25", window.0, window.1);
    let tau_spec = resolve_str(args.tau_grid, &ctx.cfg, "tau_grid", &default_grid);
    let taus = parse_grid(&tau_spec)?;
    let qc = quad_from_cfg(&ctx.cfg)?;
    let trunc = TruncationPolicy::auto(resolve(None, &ctx.cfg, "trunc_tol", 1e-8)?)?;
    let params = &ctx.params;

    let (rate, band) = match process.as_str() {
        "doob" => (doob_decay_rate(params)?, 0.05),
        "fou2" => (fou2_decay_rate(params)?, 0.10),
        other => {
            return Err(FouError::Usage(format!(
                "unknown process '{other}' for decay fitting (expected doob or fou2)"
            )))
        }
    };
    let curve: Vec<(f64, f64)> = taus
        .par_iter()
        .map(|&tau| -> Result<(f64, f64)> {
            let v = match process.as_str() {
                "doob" => doob_cov(params, 0.0, tau)?,
                _ => fou2_cov(params, 0.0, tau, &trunc, &qc)?.value,
            };
            Ok((tau, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = decay_rate_fit(&curve, window)?;
    let target_slope = -rate;
    let rel = (fit.slope - target_slope).abs() / rate;
    let pass = rel <= band;

    let mut table = report_table();
    push_metric(&mut table, "log_slope", fit.slope, 0.0, target_slope);
    push_metric(&mut table, "r_squared", fit.r_squared, 0.0, 1.0);

    let mut curve_table = io::Table::new(&["x", "value", "error_estimate"]);
    for (tau, v) in &curve {
        curve_table.push_row(vec![io::fmt_float(*tau), io::fmt_float(*v), io::fmt_float(0.0)]);
    }

    let mut man = Manifest::new("decay-rate");
    man.push("process", &process);
    ctx.push_params(&mut man);
    man.push("window", &window_spec);
    man.push("tau_grid", &tau_spec);
    if process == "fou2" {
        push_quad(&mut man, &qc);
    }

    let em = Emitter::new(&ctx.out, "decay-rate")?;
    let mut written = vec![em.write_primary("report.csv", &table.to_csv())?];
    if let Some(p) = em.write_extra("curve.csv", &curve_table.to_csv())? {
        written.push(p);
    }
    let body = vec![format!(
        "decay {process}: slope {:.6} vs target {:.6} (relative error {:.4}, band {:.2}), \
         r2 {:.6}, {}",
        fit.slope,
        target_slope,
        rel,
        band,
        fit.r_squared,
        if pass { "PASS" } else { "FAIL" }
    )];
    let lines = em.finish(&man, &body, Some(pass), started, written)?;
    Ok(Outcome { lines, checks: Some(pass), strict: ctx.strict })
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    v
}

fn stationarity(args: StationarityArgs) -> Result<Outcome> {
    let started = Instant::now();
    let ctx = Ctx::resolve(&args.common)?;
    let process = resolve_str(args.process, &ctx.cfg, "process", "doob");
    let lag = resolve(args.lag, &ctx.cfg, "lag", 1.0)?;
    let shifts_spec = resolve_str(args.shifts, &ctx.cfg, "shifts", "0,1,2");
    let paths = resolve(args.paths, &ctx.cfg, "paths", 4000usize)?;
    let refinement = resolve(args.refinement, &ctx.cfg, "refinement", 8usize)?;
    let init_s = resolve_str(args.init, &ctx.cfg, "init", "stationary");
    let trunc_tol = resolve(None, &ctx.cfg, "trunc_tol", 1e-8)?;
    let shifts = parse_list::<f64>(&shifts_spec, "shifts")?;
    if !(lag > 0.0) || !lag.is_finite() {
        return Err(FouError::Usage(format!("lag must be positive, got {lag}")));
    }
    if shifts.iter().any(|&h| h < 0.0 || !h.is_finite()) {
        return Err(FouError::Usage("shifts must be nonnegative".into()));
    }

    let mut times = vec![0.0];
    times.extend(&shifts);
    times.extend(shifts.iter().map(|&h| h + lag));
    let grid = TimeGrid::new(sorted_unique(times))?;
    let pc = PathConfig { refinement };
    let ens = match process.as_str() {
        "doob" => doob_transform(&ctx.params, &grid, ctx.seed, paths)?,
        "fou1" => {
            let init = parse_init(&init_s, TruncationPolicy::auto(trunc_tol)?)?;
            fou1_path(&ctx.params, &grid, ctx.seed, paths, &init, &pc)?
        }
        "fou2" => fou2_path(
            &ctx.params,
            &grid,
            ctx.seed,
            paths,
            Fou2Method::LangevinOnY,
            &TruncationPolicy::auto(trunc_tol)?,
            &pc,
        )?,
        other => {
            return Err(FouError::Usage(format!(
                "unknown process '{other}' for stationarity (expected doob, fou1, fou2)"
            )))
        }
    };
    let report = stationarity_test(&ens, lag, &shifts)?;

    let mut table = report_table();
    let first = report.estimates[0].1;
    for (h, est) in &report.estimates {
        let z = if (est.value - first.value).abs() == 0.0 {
            0.0
        } else {
            (est.value - first.value) / est.std_error.hypot(first.std_error)
        };
        table.push_row(vec![
            format!("cov[shift={h}]"),
            io::fmt_float(est.value),
            io::fmt_float(est.std_error),
            io::fmt_float(first.value),
            io::fmt_float(z),
        ]);
    }
    push_metric(&mut table, "max_z", report.max_z, 0.0, 3.0);

    let mut man = Manifest::new("stationarity");
    man.push("process", &process);
    ctx.push_params(&mut man);
    man.push("lag", lag);
    man.push("shifts", &shifts_spec);
    man.push("paths", paths);
    if process != "doob" {
        man.push("refinement", refinement);
        man.push("trunc_tol", trunc_tol);
    }
    if process == "fou1" {
        man.push("init", &init_s);
    }

    let em = Emitter::new(&ctx.out, "stationarity")?;
    let written = vec![em.write_primary("report.csv", &table.to_csv())?];
    let body = vec![format!(
        "stationarity {process}: lag {lag}, {} shifts, max z {:.3} (threshold 3), {}",
        report.estimates.len(),
        report.max_z,
        if report.pass { "PASS" } else { "FAIL" }
    )];
    let lines = em.finish(&man, &body, Some(report.pass), started, written)?;
    Ok(Outcome { lines, checks: Some(report.pass), strict: ctx.strict })
}

fn range(args: RangeArgs) -> Result<Outcome> {
    let started = Instant::now();
    let ctx = Ctx::resolve(&args.common)?;
    let source = resolve_str(args.source, &ctx.cfg, "source", "fgn");
    let default_lag = if source == "driver" { 24 } else { 64 };
    let max_lag = resolve(args.max_lag, &ctx.cfg, "max_lag", default_lag)?;
    let qc = quad_from_cfg(&ctx.cfg)?;
    let params = &ctx.params;
    let h = params.hurst;

    let seq: Vec<f64> = match source.as_str() {
        "fgn" => (1..=max_lag as u64)
            .map(|n| fgn_autocov(h, n))
            .collect::<Result<Vec<_>>>()?,
        "driver" => (1..=max_lag as u64)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&n| driver_autocov(params, n, &qc).map(|r| r.value))
            .collect::<Result<Vec<_>>>()?,
        other => {
            return Err(FouError::Usage(format!(
                "unknown source '{other}' (expected fgn or driver)"
            )))
        }
    };
    let diag = range_dependence_diagnostic(&seq)?;
    let expected = match source.as_str() {
        "fgn" if h > 0.5 => RangeClass::LongRange,
        "fgn" => RangeClass::ShortRange,
        _ => RangeClass::ShortRange,
    };
    let pass = diag.class == expected;

    let mut table = report_table();
    let power_target = if source == "fgn" { 2.0 * h - 2.0 } else { f64::NAN };
    let rate_target = if source == "driver" { params.alpha * (1.0 - h) / h } else { f64::NAN };
    push_metric(&mut table, "power_exponent", diag.power_fit.slope, 0.0, power_target);
    push_metric(&mut table, "power_r2", diag.power_fit.r_squared, 0.0, f64::NAN);
    push_metric(&mut table, "exp_rate", -diag.exp_fit.slope, 0.0, rate_target);
    push_metric(&mut table, "exp_r2", diag.exp_fit.r_squared, 0.0, f64::NAN);
    push_metric(
        &mut table,
        "partial_sum_converged",
        if diag.partial_sum_converged { 1.0 } else { 0.0 },
        0.0,
        f64::NAN,
    );
    push_metric(&mut table, "classification", class_code(diag.class), 0.0, class_code(expected));

    let mut man = Manifest::new("range-dependence");
    man.push("source", &source);
    ctx.push_params(&mut man);
    man.push("max_lag", max_lag);
    if source == "driver" {
        push_quad(&mut man, &qc);
    }

    let em = Emitter::new(&ctx.out, "range-dependence")?;
    let written = vec![em.write_primary("report.csv", &table.to_csv())?];
    let body = vec![
        format!(
            "range {source}: classified {} (expected {}), power exponent {:.4}, exp rate {:.4}",
            class_name(diag.class),
            class_name(expected),
            diag.power_fit.slope,
            -diag.exp_fit.slope
        ),
        format!(
            "partial sums converged: {}, {}",
            if diag.partial_sum_converged { "yes" } else { "no" },
            if pass { "PASS" } else { "FAIL" }
        ),
    ];
    let lines = em.finish(&man, &body, Some(pass), started, written)?;
    Ok(Outcome { lines, checks: Some(pass), strict: ctx.strict })
}

fn holder(args: HolderArgs) -> Result<Outcome> {
    let started = Instant::now();
    let ctx = Ctx::resolve(&args.common)?;
    let process = resolve_str(args.process, &ctx.cfg, "process", "fbm");
    let default_steps = if process == "driver" { 512 } else { 4096 };
    let t_max = resolve(args.t_max, &ctx.cfg, "t_max", 4.0)?;
    let steps = resolve(args.steps, &ctx.cfg, "steps", default_steps)?;
    let scales_spec = resolve_str(args.scales, &ctx.cfg, "scales", "1,2,4,8,16,32");
    let scales = parse_list::<usize>(&scales_spec, "scales")?;
    let refinement = resolve(args.refinement, &ctx.cfg, "refinement", 2usize)?;

    let ens = match process.as_str() {
        "fbm" => sample_fbm_circulant(ctx.params.hurst, t_max, steps, ctx.seed, 1)?,
        "driver" => {
            let grid = TimeGrid::uniform(t_max, steps)?;
            driver_process(&ctx.params, &grid, ctx.seed, 1, &PathConfig { refinement })?
        }
        other => {
            return Err(FouError::Usage(format!(
                "unknown process '{other}' for regularity estimation (expected fbm or driver)"
            )))
        }
    };
    let path = SamplePath::new(ens.grid.clone(), ens.path(0).to_vec())?;
    let fit = holder_exponent(&path, &scales)?;
    let pass = (fit.slope - ctx.params.hurst).abs() <= 0.15;

    let mut table = report_table();
    push_metric(&mut table, "holder_slope", fit.slope, 0.0, ctx.params.hurst);
    push_metric(&mut table, "r_squared", fit.r_squared, 0.0, 1.0);

    let mut man = Manifest::new("holder");
    man.push("process", &process);
    ctx.push_params(&mut man);
    man.push("t_max", t_max);
    man.push("steps", steps);
    man.push("scales", &scales_spec);
    if process == "driver" {
        man.push("refinement", refinement);
    }

    let em = Emitter::new(&ctx.out, "holder")?;
    let written = vec![em.write_primary("report.csv", &table.to_csv())?];
    let body = vec![format!(
        "holder {process}: slope {:.4} vs hurst {} (band 0.15), r2 {:.4}, {}",
        fit.slope,
        ctx.params.hurst,
        fit.r_squared,
        if pass { "PASS" } else { "FAIL" }
    )];
    let lines = em.finish(&man, &body, Some(pass), started, written)?;
    Ok(Outcome { lines, checks: Some(pass), strict: ctx.strict })
}

fn render(args: RenderArgs) -> Result<Outcome> {
    let started = Instant::now();
    // Load the config for validation only; render takes no model input.
    let _ = Ctx::resolve(&args.common)?;
    let text = std::fs::read_to_string(&args.table).map_err(|e| {
        FouError::Usage(format!("cannot read table {}: {e}", args.table.display()))
    })?;
    let table = io::Table::parse(&text)?;
    if table.rows.len() > 1_000_000 {
        return Err(FouError::Usage(format!(
            "table has {} rows, over the 10^6 limit",
            table.rows.len()
        )));
    }
    let xi = table.column_index(args.x_col.as_deref().unwrap_or("0"))?;
    let yi = table.column_index(args.y_col.as_deref().unwrap_or("1"))?;
    let xs = table.float_column(xi)?;
    let ys = table.float_column(yi)?;
    let points: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();
    let spec = PlotSpec {
        x_label: table.header[xi].clone(),
        y_label: table.header[yi].clone(),
        log_x: args.log_x,
        log_y: args.log_y,
    };
    let svg_text = svg::render(&points, &spec)?;

    let out = args.common.out.clone().unwrap_or_else(|| args.table.with_extension("svg"));
    let mut man = Manifest::new("render");
    man.push("table", args.table.display());
    man.push("x_col", table.header[xi].as_str());
    man.push("y_col", table.header[yi].as_str());
    man.push("log_x", args.log_x);
    man.push("log_y", args.log_y);

    let em = Emitter::new(&out, "render")?;
    let written = vec![em.write_primary("plot.svg", &svg_text)?];
    let body = vec![format!("render: {} points from {}", points.len(), args.table.display())];
    let lines = em.finish(&man, &body, None, started, written)?;
    Ok(Outcome { lines, checks: None, strict: args.common.strict })
}
