//! Experiment reports and their CSV/JSON serialization.
//!
//! CSV holds one row per experiment cell and nothing else, with floats
//! written to 17 significant digits, so identical runs give identical bytes.
//! Checks and run metadata go to JSON (inline, or a `.meta.json` sidecar next
//! to a CSV file).

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::ser::{Serialize, Serializer};
use serde::Serialize as DeriveSerialize;

use crate::config::{ExperimentConfig, OutputFormat};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }
}

/// 17 significant digits in scientific notation; `nan`, `inf`, `-inf` otherwise.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let mut s = String::new();
        write!(s, "{v:.16e}").expect("writing to a String cannot fail");
        s
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => s.serialize_i64(*v),
            Cell::Float(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Float(v) => s.serialize_str(&format_float(*v)),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// A pass/fail statement about the measured values.
#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct Metadata {
    pub seed: u64,
    pub version: String,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct Report {
    pub experiment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Fitted or aggregate quantities that are not per-cell.
    pub summary: Vec<(String, Cell)>,
    pub checks: Vec<Check>,
    pub metadata: Metadata,
}

impl Report {
    pub fn new(experiment: &str, seed: u64, columns: &[&str]) -> Self {
        Self {
            experiment: experiment.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: vec![],
            summary: vec![],
            checks: vec![],
            metadata: Metadata { seed, version: env!("CARGO_PKG_VERSION").into(), wall_clock_seconds: 0.0 },
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_summary(&mut self, name: &str, value: impl Into<Cell>) {
        self.summary.push((name.into(), value.into()));
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of a numeric column, in row order.
    pub fn values(&self, name: &str) -> Vec<f64> {
        match self.column(name) {
            Some(i) => self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect(),
            None => vec![],
        }
    }

    pub fn summary_value(&self, name: &str) -> Option<f64> {
        self.summary.iter().find(|(n, _)| n == name).and_then(|(_, v)| v.as_f64())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    /// Writes the report where the config asks: `--out` or stdout, CSV or JSON.
    /// A CSV file gets a `<file>.meta.json` sidecar with summary, checks and
    /// metadata.
    pub fn emit(&self, config: &ExperimentConfig) -> Result<()> {
        match (&config.out, config.format) {
            (Some(path), OutputFormat::Csv) => {
                self.write_csv(std::fs::File::create(path)?)?;
                self.write_sidecar(&sidecar_path(path))?;
            }
            (Some(path), OutputFormat::Json) => {
                let mut f = std::fs::File::create(path)?;
                self.write_json(&mut f)?;
                writeln!(f)?;
            }
            (None, OutputFormat::Csv) => self.write_csv(std::io::stdout().lock())?,
            (None, OutputFormat::Json) => {
                let mut out = std::io::stdout().lock();
                self.write_json(&mut out)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }

    fn write_sidecar(&self, path: &Path) -> Result<()> {
        #[derive(DeriveSerialize)]
        struct Sidecar<'a> {
            experiment: &'a str,
            summary: &'a [(String, Cell)],
            checks: &'a [Check],
            metadata: &'a Metadata,
        }
        let mut f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(
            &mut f,
            &Sidecar { experiment: &self.experiment, summary: &self.summary, checks: &self.checks, metadata: &self.metadata },
        )?;
        writeln!(f)?;
        Ok(())
    }

    /// Human-readable summary and check lines.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        for (name, value) in &self.summary {
            let _ = writeln!(s, "{name} = {}", value.csv_field());
        }
        for c in &self.checks {
            let _ = writeln!(s, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        s
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}
