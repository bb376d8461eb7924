//! Data tables (CSV or JSON) and run manifests.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use chainbell_core::Convention;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits: round-trips every f64
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Flag(v) => u8::from(*v).to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Flag(v) => json!(v),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn schema(&self) -> String {
        format!("chainbell-{} v{SCHEMA_VERSION}", self.name)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut out = out;
        writeln!(out, "# {}", self.schema())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Rows as objects, together with the deterministic part of the run
    /// description (no timings) so the file itself is reproducible.
    pub fn to_json(&self, config: &RunConfig, convention: Option<Convention>) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        // where the file went and how many threads made it do not change it
        let mut config = config.clone();
        config.output = None;
        config.threads = None;
        json!({
            "schema": self.schema(),
            "manifest": { "config": config, "convention_used": convention },
            "rows": rows,
        })
    }

    pub fn write<W: Write>(
        &self,
        out: W,
        format: Format,
        config: &RunConfig,
        convention: Option<Convention>,
    ) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                let mut out = out;
                serde_json::to_writer_pretty(&mut out, &self.to_json(config, convention))?;
                writeln!(out)?;
                Ok(())
            }
        }
    }
}

/// One named numerical check with its worst deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_deviation,
            tolerance,
            // NaN fails
            pass: max_deviation <= tolerance,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<32} max deviation {:.3e} (tolerance {:.0e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.max_deviation,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema: String,
    pub config: RunConfig,
    pub convention_used: Option<Convention>,
    pub convention_probe: Option<Value>,
    pub data_file: Option<PathBuf>,
    pub started_unix_seconds: f64,
    pub wall_clock_seconds: f64,
    pub checks: Vec<Check>,
    pub all_checks_pass: bool,
    pub summary: Value,
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn write_manifest(manifest: &RunManifest, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Output(path.to_path_buf(), e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, manifest)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes the table to `path`, or to stdout when `path` is `None`.
pub fn write_table(
    table: &Table,
    path: Option<&Path>,
    format: Format,
    config: &RunConfig,
    convention: Option<Convention>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::Output(p.to_path_buf(), e))?;
            let mut w = BufWriter::new(file);
            table.write(&mut w, format, config, convention)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write(&mut lock, format, config, convention)?;
        }
    }
    Ok(())
}
