//! Output plumbing: atomic file writes, run directories, and the CSV
//! table format (`,` separator, `.` decimal, 17 significant digits).

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{FouError, Result};

/// 17 significant digits; -0.0 canonicalized so reruns byte-match.
pub fn fmt_float(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// Write through a temp file in the target directory plus rename.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| {
        FouError::Config(format!("cannot create temp file in {}: {e}", dir.display()))
    })?;
    tmp.write_all(content.as_bytes())
        .map_err(|e| FouError::Config(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| FouError::Config(format!("cannot persist {}: {e}", path.display())))?;
    Ok(())
}

/// `root/<stamp>-<kind>`, suffixed `-2`, `-3`, ... on collision.
pub fn create_run_dir(root: &Path, kind: &str, stamp: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(root).map_err(|e| {
        FouError::Config(format!("cannot create output root {}: {e}", root.display()))
    })?;
    let mut name = format!("{stamp}-{kind}");
    let mut n = 1usize;
    loop {
        let dir = root.join(&name);
        match std::fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                n += 1;
                if n > 10_000 {
                    return Err(FouError::Config(format!(
                        "cannot find a free run directory under {}",
                        root.display()
                    )));
                }
                name = format!("{stamp}-{kind}-{n}");
            }
            Err(e) => {
                return Err(FouError::Config(format!(
                    "cannot create run directory {}: {e}",
                    dir.display()
                )))
            }
        }
    }
}

/// In-memory CSV table. The dialect is plain: no quoting, fields must
/// not contain commas or newlines.
#[derive(Debug)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.rows.len() + 1));
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Table> {
        let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
        let header_line = lines
            .next()
            .filter(|l| !l.trim().is_empty())
            .ok_or_else(|| FouError::Usage("malformed CSV: missing header line".into()))?;
        let header: Vec<String> = header_line.split(',').map(|s| s.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (idx, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
            if cells.len() != header.len() {
                return Err(FouError::Usage(format!(
                    "malformed CSV: line {} has {} fields, header has {}",
                    idx + 2,
                    cells.len(),
                    header.len()
                )));
            }
            rows.push(cells);
        }
        Ok(Table { header, rows })
    }

    /// Column selector: exact header name, else a 0-based index.
    pub fn column_index(&self, sel: &str) -> Result<usize> {
        if let Some(i) = self.header.iter().position(|h| h == sel) {
            return Ok(i);
        }
        if let Ok(i) = sel.parse::<usize>() {
            if i < self.header.len() {
                return Ok(i);
            }
        }
        Err(FouError::Usage(format!(
            "no column '{sel}' (columns: {})",
            self.header.join(", ")
        )))
    }

    /// Parse one column as f64, naming the offending cell on failure.
    pub fn float_column(&self, col: usize) -> Result<Vec<f64>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row[col].parse::<f64>().map_err(|_| {
                    FouError::Usage(format!(
                        "malformed CSV: line {} column '{}': not a number: '{}'",
                        i + 2,
                        self.header[col],
                        row[col]
                    ))
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_17_digits_and_canonical_zero() {
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_float(-0.0), "0.0000000000000000e0");
        assert_eq!(fmt_float(0.17273625126185875405), "1.7273625126185876e-1");
        let v = 0.6495190528383290_f64;
        assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn table_round_trips_and_reports_malformed_lines() {
        let mut t = Table::new(&["x", "value"]);
        t.push_row(vec![fmt_float(1.0), fmt_float(2.0)]);
        let text = t.to_csv();
        let back = Table::parse(&text).unwrap();
        assert_eq!(back.header, vec!["x", "value"]);
        assert_eq!(back.rows.len(), 1);
        assert_eq!(back.column_index("value").unwrap(), 1);
        assert_eq!(back.column_index("1").unwrap(), 1);
        assert!(back.column_index("nope").is_err());
        assert_eq!(back.float_column(0).unwrap(), vec![1.0]);

        assert!(matches!(Table::parse(""), Err(FouError::Usage(_))));
        let err = Table::parse("a,b\n1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        let bad = Table::parse("a,b\n1,x\n").unwrap();
        assert!(bad.float_column(1).is_err());
    }

    #[test]
    fn atomic_write_and_run_dirs() {
        let root = tempfile::tempdir().unwrap();
        let dir = create_run_dir(root.path(), "simulate", "20260815T000000Z").unwrap();
        assert!(dir.ends_with("20260815T000000Z-simulate"));
        let again = create_run_dir(root.path(), "simulate", "20260815T000000Z").unwrap();
        assert!(again.ends_with("20260815T000000Z-simulate-2"));

        let target = dir.join("table.csv");
        write_atomic(&target, "x\n1\n").unwrap();
        assert_eq!(std::fs::read_to_string(&target).unwrap(), "x\n1\n");
    }
}
