//! Report and table output.
//!
//! Reports contain no timestamps or host data, so identical configurations
//! and seeds give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub task: &'static str,
    pub seed: u64,
    pub config: Value,
    pub results: Value,
    pub invariants: Vec<Check>,
    pub pass: bool,
}

/// Invariants gathered while a task runs.
#[derive(Debug, Default)]
pub struct Checks(Vec<Check>);

impl Checks {
    /// Records `value ≤ tolerance`. NaN fails.
    pub fn at_most(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        self.0.push(Check {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        });
    }

    /// Records a yes/no invariant as a count of violations against zero.
    pub fn holds(&mut self, name: impl Into<String>, violations: usize) {
        self.at_most(name, violations as f64, 0.0);
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.0.iter().find(|c| !c.pass)
    }

    pub fn into_vec(self) -> Vec<Check> {
        self.0
    }
}

/// A CSV table with a fixed header.
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip form, so CSV values match the JSON report.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Everything a task produces besides the invariants.
pub struct Output {
    pub results: Value,
    pub table: Option<Table>,
    /// Extra JSON documents written as `<task>-<suffix>.json`.
    pub attachments: Vec<(&'static str, String)>,
}

pub struct Written {
    pub report: PathBuf,
    pub files: Vec<PathBuf>,
}

pub fn write(dir: &Path, report: &Report, output: &Output) -> Result<Written, CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let path = dir.join(format!("{}.json", report.task));
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    fs::write(&path, text).map_err(CliError::io(&path))?;
    let mut files = Vec::new();
    if let Some(table) = &output.table {
        let csv_path = dir.join(format!("{}.csv", report.task));
        let mut w = csv::Writer::from_path(&csv_path)?;
        w.write_record(table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(CliError::io(&csv_path))?;
        files.push(csv_path);
    }
    for (suffix, body) in &output.attachments {
        let p = dir.join(format!("{}-{suffix}.json", report.task));
        fs::write(&p, body).map_err(CliError::io(&p))?;
        files.push(p);
    }
    Ok(Written { report: path, files })
}
