//! Experiment manifests: the flat key = value record that pins down
//! every numeric output of a run. Two runs with equal manifests
//! (ignoring `created_utc`) produce byte-identical tables.

use std::fmt::Display;
use std::time::{SystemTime, UNIX_EPOCH};

/// Ordered manifest entries under a fixed header of kind, tool version,
/// and creation time.
pub struct Manifest {
    kind: String,
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(kind: &str) -> Self {
        Manifest { kind: kind.to_string(), entries: Vec::new() }
    }

    /// Display formatting: f64 uses the shortest round-trip form.
    pub fn push(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self, created_utc: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("kind = {}\n", self.kind));
        out.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
        out.push_str(&format!("created_utc = {created_utc}\n"));
        for (k, v) in &self.entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

/// (y, m, d) of the civil date `days` after 1970-01-01.
fn civil_from_days(days: i64) -> (i64, u32, u32) {
    let z = days + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = (if mp < 10 { mp + 3 } else { mp - 9 }) as u32;
    (if m <= 2 { y + 1 } else { y }, m, d)
}

/// Current UTC time as ("2026-08-15T12:00:00Z", "20260815T120000Z"):
/// the readable manifest field and the run-directory stamp.
pub fn utc_now() -> (String, String) {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs() as i64)
        .unwrap_or(0);
    let days = secs.div_euclid(86_400);
    let sod = secs.rem_euclid(86_400);
    let (y, m, d) = civil_from_days(days);
    let (hh, mm, ss) = (sod / 3600, (sod % 3600) / 60, sod % 60);
    (
        format!("{y:04}-{m:02}-{d:02}T{hh:02}:{mm:02}:{ss:02}Z"),
        format!("{y:04}{m:02}{d:02}T{hh:02}{mm:02}{ss:02}Z"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn civil_conversion_hits_known_dates() {
        assert_eq!(civil_from_days(0), (1970, 1, 1));
        assert_eq!(civil_from_days(19_723), (2024, 1, 1));
        // Leap day and the day after.
        assert_eq!(civil_from_days(19_782), (2024, 2, 29));
        assert_eq!(civil_from_days(19_783), (2024, 3, 1));
        assert_eq!(civil_from_days(-1), (1969, 12, 31));
    }

    #[test]
    fn manifest_renders_header_then_entries_in_order() {
        let mut m = Manifest::new("simulate");
        m.push("process", "fou2");
        m.push("hurst", 0.75);
        let text = m.render("2026-08-15T00:00:00Z");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "kind = simulate");
        assert!(lines[1].starts_with("version = "));
        assert_eq!(lines[2], "created_utc = 2026-08-15T00:00:00Z");
        assert_eq!(lines[3], "process = fou2");
        assert_eq!(lines[4], "hurst = 0.75");
    }

    #[test]
    fn timestamps_are_consistent_shapes() {
        let (readable, stamp) = utc_now();
        assert_eq!(readable.len(), 20);
        assert_eq!(stamp.len(), 16);
        assert!(readable.ends_with('Z') && stamp.ends_with('Z'));
        assert_eq!(readable[0..4], stamp[0..4]);
    }
}
