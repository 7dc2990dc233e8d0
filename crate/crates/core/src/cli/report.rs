//! Output files of a run.
//!
//! `results.csv` has one row per compared quantity:
//!
//! | column      | meaning                                                  |
//! |-------------|----------------------------------------------------------|
//! | `check`     | check name, e.g. `moments` or `spectrum`                 |
//! | `item`      | quantity inside the check                                |
//! | `value`     | measured or computed value                               |
//! | `reference` | value it is compared against (oracle, bound, other run)  |
//! | `std_error` | statistical error of `value - reference`, 0 when exact   |
//! | `tolerance` | allowed deviation after `--tolerance-scale`              |
//! | `pass`      | `true` / `false`                                         |
//!
//! Subcommands may add data tables (`samples.csv`, `tube_scan.csv`,
//! `oracles.csv`); their columns are listed in the README.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub check: String,
    pub item: String,
    pub value: f64,
    pub reference: f64,
    pub std_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default)]
pub struct DataTable {
    pub file: String,
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
}

impl DataTable {
    pub fn new(file: &str, header: &[&str]) -> Self {
        Self { file: file.into(), header: header.iter().map(|s| s.to_string()).collect(), records: Vec::new() }
    }

    pub fn push(&mut self, record: Vec<String>) {
        self.records.push(record);
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub rows: Vec<Row>,
    pub tables: Vec<DataTable>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub rows: usize,
    pub failed: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub command: String,
    pub pass: bool,
    pub checks: Vec<CheckSummary>,
}

impl Report {
    pub fn push(&mut self, check: &str, item: impl Into<String>, value: f64, reference: f64, std_error: f64, tolerance: f64, pass: bool) {
        self.rows.push(Row { check: check.into(), item: item.into(), value, reference, std_error, tolerance, pass });
    }

    /// Row passing iff `|value - reference| <= tolerance`.
    pub fn compare(&mut self, check: &str, item: impl Into<String>, value: f64, reference: f64, std_error: f64, tolerance: f64) {
        let pass = (value - reference).abs() <= tolerance;
        self.push(check, item, value, reference, std_error, tolerance, pass);
    }

    /// Row passing iff `value <= bound + tolerance`.
    pub fn upper(&mut self, check: &str, item: impl Into<String>, value: f64, bound: f64, std_error: f64, tolerance: f64) {
        let pass = value <= bound + tolerance;
        self.push(check, item, value, bound, std_error, tolerance, pass);
    }

    /// Row passing iff `value >= bound - tolerance`.
    pub fn lower(&mut self, check: &str, item: impl Into<String>, value: f64, bound: f64, std_error: f64, tolerance: f64) {
        let pass = value >= bound - tolerance;
        self.push(check, item, value, bound, std_error, tolerance, pass);
    }

    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Per-check pass counts in first-appearance order.
    pub fn checks(&self) -> Vec<CheckSummary> {
        let mut out: Vec<CheckSummary> = Vec::new();
        for r in &self.rows {
            let entry = match out.iter_mut().find(|c| c.name == r.check) {
                Some(c) => c,
                None => {
                    out.push(CheckSummary { name: r.check.clone(), rows: 0, failed: 0, pass: true });
                    out.last_mut().unwrap()
                }
            };
            entry.rows += 1;
            if !r.pass {
                entry.failed += 1;
                entry.pass = false;
            }
        }
        out
    }

    pub fn summary(&self, command: &str) -> Summary {
        Summary { schema_version: SUMMARY_SCHEMA_VERSION, command: command.into(), pass: self.pass(), checks: self.checks() }
    }

    pub fn write(&self, dir: &Path, command: &str) -> Result<()> {
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        let mut w = csv::Writer::from_path(dir.join("results.csv")).map_err(csv_err)?;
        for r in &self.rows {
            w.serialize(r).map_err(csv_err)?;
        }
        w.flush()?;
        for t in &self.tables {
            let mut w = csv::Writer::from_path(dir.join(&t.file)).map_err(csv_err)?;
            w.write_record(&t.header).map_err(csv_err)?;
            for rec in &t.records {
                w.write_record(rec).map_err(csv_err)?;
            }
            w.flush()?;
        }
        write_json(&dir.join("summary.json"), &self.summary(command))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Formats a float so it parses back to the same bits.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
