//! Behavioral tests for the command-line front end: exit-code
//! taxonomy, option precedence, run-directory layout, and the SVG
//! renderer's handling of degenerate tables.

use std::path::Path;
use std::process::{Command, Output};

fn fou(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fou"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Value column of the single-row covariance table written by `cov`.
fn read_single_value(path: &Path) -> f64 {
    let text = std::fs::read_to_string(path).unwrap();
    let row = text.lines().nth(1).expect("one data row");
    row.split(',').nth(1).unwrap().parse().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(fou(&["--help"]).status.code(), Some(0));
    assert_eq!(fou(&["--version"]).status.code(), Some(0));
    assert_eq!(fou(&["simulate", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_domain_and_config_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();

    let out = fou(&["kernel", "--hurst", "0.25", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("1/2 < H"), "stderr: {}", stderr_of(&out));

    let out = fou(&["simulate", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));

    let out = fou(&["cov", "--formula", "imaginary"]);
    assert_eq!(out.status.code(), Some(2));

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "hurst = 0.7\nmystery = 1\n").unwrap();
    let out = fou(&["cov", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("mystery") && err.contains(":2:"), "stderr: {err}");
}

#[test]
fn strict_mode_turns_failed_checks_into_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("runs");
    // A zero-started first-kind path is transient, so the shifted
    // covariances disagree and the stationarity check fails.
    let args = [
        "experiment", "stationarity", "--process", "fou1", "--init", "zero", "--lag", "1",
        "--shifts", "0,1,2", "--paths", "2000", "--seed", "7",
        "--out", out_dir.to_str().unwrap(),
    ];
    let relaxed = fou(&args);
    assert_eq!(relaxed.status.code(), Some(0), "{}", stderr_of(&relaxed));
    let stdout = String::from_utf8_lossy(&relaxed.stdout).into_owned();
    assert!(stdout.contains("result: FAIL"), "stdout: {stdout}");

    let strict: Vec<&str> = args.iter().copied().chain(["--strict"]).collect();
    let gated = fou(&strict);
    assert_eq!(gated.status.code(), Some(1), "{}", stderr_of(&gated));

    // The same experiment on the stationary construction passes.
    let runs2 = dir.path().join("runs2");
    let ok_args = [
        "experiment", "stationarity", "--process", "doob", "--lag", "1", "--shifts", "0,1,2",
        "--paths", "2000", "--seed", "7", "--strict",
        "--out", runs2.to_str().unwrap(),
    ];
    let ok = fou(&ok_args);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr_of(&ok));
}

#[test]
fn flags_override_config_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("params.cfg");
    std::fs::write(&cfg, "hurst = 0.6\nalpha = 2.0\n").unwrap();

    // Defaults: H = 0.75, alpha = 1, stationary variance (H/alpha)^{2H}.
    let a = dir.path().join("a.csv");
    let out = fou(&["cov", "--formula", "doob", "--tau-grid", "0:0:1", "--out", a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!((read_single_value(&a) - 0.75f64.powf(1.5)).abs() < 1e-12);

    // Config file wins over the defaults.
    let b = dir.path().join("b.csv");
    let out = fou(&[
        "cov", "--formula", "doob", "--tau-grid", "0:0:1",
        "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!((read_single_value(&b) - 0.3f64.powf(1.2)).abs() < 1e-12);

    // An explicit flag wins over the config file.
    let c = dir.path().join("c.csv");
    let out = fou(&[
        "cov", "--formula", "doob", "--tau-grid", "0:0:1", "--hurst", "0.75",
        "--config", cfg.to_str().unwrap(), "--out", c.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!((read_single_value(&c) - 0.375f64.powf(1.5)).abs() < 1e-12);
}

#[test]
fn run_directories_carry_manifest_tables_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let runs = dir.path().join("runs");
    let out = fou(&[
        "experiment", "decay-rate", "--process", "doob", "--window", "5:10",
        "--tau-grid", "5:10:0.5", "--out", runs.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(stdout.contains("result: PASS"), "stdout: {stdout}");
    assert!(stdout.contains("wrote "), "stdout: {stdout}");

    let run_dir = std::fs::read_dir(&runs).unwrap().next().unwrap().unwrap().path();
    assert!(run_dir.file_name().unwrap().to_str().unwrap().ends_with("-decay-rate"));
    for name in ["manifest.txt", "report.csv", "curve.csv", "summary.txt"] {
        assert!(run_dir.join(name).is_file(), "missing {name}");
    }
    let manifest = std::fs::read_to_string(run_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("kind = decay-rate"));
    assert!(manifest.contains("window = 5:10"));
    let summary = std::fs::read_to_string(run_dir.join("summary.txt")).unwrap();
    assert!(summary.contains("result = PASS"));

    let report = std::fs::read_to_string(run_dir.join("report.csv")).unwrap();
    assert!(report.starts_with("metric,estimate,std_error,target,z"));
}

#[test]
fn render_draws_curves_and_degrades_gracefully() {
    let dir = tempfile::tempdir().unwrap();

    let table = dir.path().join("cov.csv");
    let out = fou(&[
        "cov", "--formula", "doob", "--tau-grid", "0:5:0.5", "--out", table.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let svg = dir.path().join("cov.svg");
    let out = fou(&[
        "render", "--table", table.to_str().unwrap(), "--log-y",
        "--out", svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let body = std::fs::read_to_string(&svg).unwrap();
    assert!(body.starts_with("<svg"));
    assert!(body.contains("<polyline"));

    // Header-only table: axes come out, no curve.
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "x,value\n").unwrap();
    let empty_svg = dir.path().join("empty.svg");
    let out = fou(&[
        "render", "--table", empty.to_str().unwrap(), "--out", empty_svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let body = std::fs::read_to_string(&empty_svg).unwrap();
    assert!(body.starts_with("<svg") && !body.contains("<polyline"));

    // Ragged rows are a usage error.
    let ragged = dir.path().join("ragged.csv");
    std::fs::write(&ragged, "x,value\n1,2\n3\n").unwrap();
    let out = fou(&["render", "--table", ragged.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("line"), "stderr: {}", stderr_of(&out));

    // Named column selection.
    let named_svg = dir.path().join("named.svg");
    let out = fou(&[
        "render", "--table", table.to_str().unwrap(), "--x-col", "x", "--y-col", "value",
        "--out", named_svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
}
