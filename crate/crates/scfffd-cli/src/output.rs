//! CSV emission (RFC-4180 style: UTF-8, `\n` endings, header row, plain
//! numeric fields) and the JSON metadata sidecar.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// A CSV file under construction. Every row carries the full parameter
/// point, so concatenated outputs stay self-describing.
pub struct Csv {
    header: &'static [&'static str],
    body: String,
    rows: usize,
}

impl Csv {
    pub fn new(header: &'static [&'static str]) -> Self {
        Self { header, body: String::new(), rows: 0 }
    }

    pub fn row(&mut self, fields: &[CsvField]) {
        assert_eq!(fields.len(), self.header.len(), "row width mismatch");
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.body.push(',');
            }
            match f {
                CsvField::Str(s) => {
                    debug_assert!(!s.contains([',', '"', '\n']), "field would need quoting: {s}");
                    self.body.push_str(s);
                }
                CsvField::U64(v) => {
                    let _ = write!(self.body, "{v}");
                }
                CsvField::F64(v) => {
                    let _ = write!(self.body, "{v}");
                }
            }
        }
        self.body.push('\n');
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = self.header.join(",");
        text.push('\n');
        text.push_str(&self.body);
        std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
    }
}

pub enum CsvField {
    Str(&'static str),
    U64(u64),
    F64(f64),
}

impl From<f64> for CsvField {
    fn from(v: f64) -> Self {
        CsvField::F64(v)
    }
}

impl From<u64> for CsvField {
    fn from(v: u64) -> Self {
        CsvField::U64(v)
    }
}

impl From<&'static str> for CsvField {
    fn from(v: &'static str) -> Self {
        CsvField::Str(v)
    }
}

/// Per-solve record for the sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct SolveRecord {
    pub snr_db: f64,
    pub alpha_star: f64,
    pub iterations: u32,
    pub residual: f64,
    pub method: &'static str,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    config: &'a crate::config::Resolved,
    solver: &'a [SolveRecord],
    rows_written: usize,
    wall_time_secs: f64,
}

/// Writes `<out>.meta.json` next to the CSV.
pub fn write_sidecar(
    resolved: &crate::config::Resolved,
    solver: &[SolveRecord],
    rows: usize,
    wall_time_secs: f64,
) -> Result<(), CliError> {
    let mut path = PathBuf::from(resolved.out.as_os_str().to_os_string());
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.set_file_name(name);
    let doc = Sidecar { config: resolved, solver, rows_written: rows, wall_time_secs };
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::Io(format!("cannot serialize metadata: {e}")))?;
    std::fs::write(&path, text)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}
