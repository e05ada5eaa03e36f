//! Flat key = value configuration files and the flag > file > default
//! resolution order.
//!
//! Manifests use the same grammar plus the bookkeeping keys `kind`,
//! `version`, and `created_utc`, which the loader skips; a manifest
//! therefore replays through `--config`.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{FouError, Result};

/// Keys a config file may set. Commands read the subset they use.
const SETTABLE_KEYS: &[&str] = &[
    "hurst",
    "alpha",
    "gamma",
    "seed",
    "paths",
    "t_max",
    "steps",
    "refinement",
    "process",
    "method",
    "init",
    "trunc_tol",
    "trunc_cutoff",
    "formula",
    "terms",
    "tau_grid",
    "mode",
    "a",
    "probes",
    "window",
    "lag",
    "shifts",
    "source",
    "max_lag",
    "scales",
    "quad_rel_tol",
    "quad_abs_tol",
    "quad_max_subdivisions",
];

/// Manifest bookkeeping keys, ignored when a manifest is read back.
const METADATA_KEYS: &[&str] = &["kind", "version", "created_utc"];

#[derive(Debug, Default)]
pub struct FileConfig {
    entries: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn empty() -> Self {
        FileConfig::default()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            FouError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(FouError::Config(format!(
                    "{origin}:{}: expected 'key = value', got '{line}'",
                    idx + 1
                )));
            };
            let key = k.trim();
            let value = v.trim();
            if METADATA_KEYS.contains(&key) {
                continue;
            }
            if !SETTABLE_KEYS.contains(&key) {
                return Err(FouError::Config(format!(
                    "{origin}:{}: unknown key '{key}'",
                    idx + 1
                )));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(FouError::Config(format!(
                    "{origin}:{}: duplicate key '{key}'",
                    idx + 1
                )));
            }
        }
        Ok(FileConfig { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

/// Flag value if given, else the parsed config entry, else the default.
pub fn resolve<T>(flag: Option<T>, cfg: &FileConfig, key: &str, default: T) -> Result<T>
where
    T: FromStr,
    T::Err: Display,
{
    match flag {
        Some(v) => Ok(v),
        None => match cfg.get(key) {
            Some(raw) => raw.parse().map_err(|e| {
                FouError::Config(format!("config key '{key}': cannot parse '{raw}': {e}"))
            }),
            None => Ok(default),
        },
    }
}

/// Like [`resolve`] but without a default.
pub fn resolve_opt<T>(flag: Option<T>, cfg: &FileConfig, key: &str) -> Result<Option<T>>
where
    T: FromStr,
    T::Err: Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => match cfg.get(key) {
            Some(raw) => raw.parse().map(Some).map_err(|e| {
                FouError::Config(format!("config key '{key}': cannot parse '{raw}': {e}"))
            }),
            None => Ok(None),
        },
    }
}

pub fn resolve_str(flag: Option<String>, cfg: &FileConfig, key: &str, default: &str) -> String {
    flag.unwrap_or_else(|| cfg.get(key).unwrap_or(default).to_string())
}

fn parse_one<T>(item: &str, what: &str) -> Result<T>
where
    T: FromStr,
    T::Err: Display,
{
    item.trim()
        .parse()
        .map_err(|e| FouError::Usage(format!("{what}: cannot parse '{}': {e}", item.trim())))
}

/// "start:end:step" with step > 0, end >= start; inclusive of the end
/// up to a step-relative tolerance.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(FouError::Usage(format!(
            "grid '{spec}' must have the form start:end:step"
        )));
    }
    let start: f64 = parse_one(parts[0], "grid start")?;
    let end: f64 = parse_one(parts[1], "grid end")?;
    let step: f64 = parse_one(parts[2], "grid step")?;
    if !start.is_finite() || !end.is_finite() || !(step > 0.0) || !step.is_finite() {
        return Err(FouError::Usage(format!(
            "grid '{spec}' needs finite bounds and step > 0"
        )));
    }
    if end < start {
        return Err(FouError::Usage(format!("grid '{spec}' has end < start")));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    if n > 1_000_001 {
        return Err(FouError::Usage(format!("grid '{spec}' has {n} points, over 10^6 + 1")));
    }
    Ok((0..n).map(|i| start + step * i as f64).collect())
}

/// "lo:hi" with lo < hi.
pub fn parse_window(spec: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 {
        return Err(FouError::Usage(format!("window '{spec}' must have the form lo:hi")));
    }
    let lo: f64 = parse_one(parts[0], "window low end")?;
    let hi: f64 = parse_one(parts[1], "window high end")?;
    if !(lo < hi) {
        return Err(FouError::Usage(format!("window '{spec}' needs lo < hi")));
    }
    Ok((lo, hi))
}

/// Comma-separated values: "4,16,64".
pub fn parse_list<T>(spec: &str, what: &str) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: Display,
{
    if spec.trim().is_empty() {
        return Err(FouError::Usage(format!("{what}: empty list")));
    }
    spec.split(',').map(|item| parse_one(item, what)).collect()
}

/// Comma-separated s:t pairs: "1:2,0.5:3".
pub fn parse_probes(spec: &str) -> Result<Vec<(f64, f64)>> {
    if spec.trim().is_empty() {
        return Err(FouError::Usage("probes: empty list".into()));
    }
    spec.split(',')
        .map(|pair| {
            let parts: Vec<&str> = pair.split(':').collect();
            if parts.len() != 2 {
                return Err(FouError::Usage(format!(
                    "probe '{}' must have the form s:t",
                    pair.trim()
                )));
            }
            Ok((parse_one(parts[0], "probe s")?, parse_one(parts[1], "probe t")?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parses_skips_metadata_and_rejects_unknowns() {
        let cfg = FileConfig::parse(
            "# comment\nhurst = 0.6\n\nkind = simulate\nseed=9\n",
            "test",
        )
        .unwrap();
        assert_eq!(cfg.get("hurst"), Some("0.6"));
        assert_eq!(cfg.get("seed"), Some("9"));
        assert_eq!(cfg.get("kind"), None);

        assert!(matches!(
            FileConfig::parse("bogus_key = 1\n", "test"),
            Err(FouError::Config(_))
        ));
        assert!(matches!(FileConfig::parse("just a line\n", "test"), Err(FouError::Config(_))));
        assert!(matches!(
            FileConfig::parse("seed = 1\nseed = 2\n", "test"),
            Err(FouError::Config(_))
        ));
    }

    #[test]
    fn resolution_prefers_flag_then_file_then_default() {
        let cfg = FileConfig::parse("alpha = 2.5\n", "test").unwrap();
        assert_eq!(resolve(Some(9.0), &cfg, "alpha", 1.0).unwrap(), 9.0);
        assert_eq!(resolve(None, &cfg, "alpha", 1.0).unwrap(), 2.5);
        assert_eq!(resolve::<f64>(None, &cfg, "gamma", 1.0).unwrap(), 1.0);

        let bad = FileConfig::parse("alpha = soup\n", "test").unwrap();
        assert!(matches!(resolve::<f64>(None, &bad, "alpha", 1.0), Err(FouError::Config(_))));
    }

    #[test]
    fn grid_list_and_probe_parsing() {
        let g = parse_grid("0:1:0.25").unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("2:2:1").unwrap(), vec![2.0]);
        assert!(parse_grid("0:1:-0.1").is_err());
        assert!(parse_grid("0:1").is_err());

        assert_eq!(parse_list::<f64>("4,16", "a").unwrap(), vec![4.0, 16.0]);
        assert!(parse_list::<usize>("1,x", "scales").is_err());

        assert_eq!(parse_probes("1:2,0.5:3").unwrap(), vec![(1.0, 2.0), (0.5, 3.0)]);
        assert!(parse_probes("1-2").is_err());

        assert_eq!(parse_window("5:15").unwrap(), (5.0, 15.0));
        assert!(parse_window("15:5").is_err());
    }
}
