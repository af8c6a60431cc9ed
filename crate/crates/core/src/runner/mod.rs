//! Batch scenario runner: named verification suites, a JSON report and
//! plot-ready CSV files.

mod catalog;
mod config;
mod suites;

pub use catalog::catalog;
pub use config::{ConfigError, ModelParams, SampleCounts, ScenarioConfig, ScenarioKind};

use serde::{Deserialize, Serialize};
use std::fmt::Display;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// How a computed value is judged against its expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `computed ≤ tolerance`; `expected` is zero.
    AtMost,
    /// `|computed − expected| ≤ tolerance`.
    Absolute,
    /// `|computed − expected| ≤ tolerance·|expected|`.
    Relative,
    /// `computed ≥ expected`; the tolerance is unused.
    AtLeast,
}

impl Comparison {
    fn passes(self, computed: f64, expected: f64, tolerance: f64) -> bool {
        if !computed.is_finite() {
            return false;
        }
        match self {
            Comparison::AtMost => computed <= tolerance,
            Comparison::Absolute => (computed - expected).abs() <= tolerance,
            Comparison::Relative => (computed - expected).abs() <= tolerance * expected.abs(),
            Comparison::AtLeast => computed >= expected,
        }
    }
}

/// Catalog entry for a check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSpec {
    pub name: String,
    /// The identity being verified, written out as a formula.
    pub anchor: &'static str,
    pub tolerance: f64,
    pub comparison: Comparison,
}

impl CheckSpec {
    pub(crate) fn new(name: impl Into<String>, anchor: &'static str, tolerance: f64, comparison: Comparison) -> Self {
        Self { name: name.into(), anchor, tolerance, comparison }
    }
}

/// What a suite produced for one named check.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Outcome {
    pub name: String,
    pub result: Result<(f64, f64), String>,
}

impl Outcome {
    pub fn value(name: impl Into<String>, computed: f64, expected: f64) -> Self {
        Self { name: name.into(), result: Ok((computed, expected)) }
    }

    /// A residual-type result with expectation zero.
    pub fn residual<E: Display>(name: impl Into<String>, r: Result<f64, E>) -> Self {
        Self::from_result(name, r.map(|v| (v, 0.0)))
    }

    pub fn from_result<E: Display>(name: impl Into<String>, r: Result<(f64, f64), E>) -> Self {
        Self { name: name.into(), result: r.map_err(|e| e.to_string()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    /// `None` when the computation failed.
    pub computed: Option<f64>,
    pub expected: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

/// Wall-clock data; the only part of a report that varies between
/// identical runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timestamp {
    pub started_unix_ms: u128,
    pub runtime_ms: f64,
}

/// A plot-ready table of numbers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.14e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scenario data files; each present table becomes `<name>.csv`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataFiles {
    pub fields: Option<Table>,
    pub characteristic: Option<Table>,
    pub loop_data: Option<Table>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub scenario: ScenarioKind,
    pub pass: bool,
    pub summary: Summary,
    /// Sorted by name.
    pub checks: Vec<Check>,
    pub config: ScenarioConfig,
    pub timestamp: Timestamp,
    #[serde(skip)]
    pub data: DataFiles,
}

impl Report {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

fn assemble(cfg: &ScenarioConfig, outcomes: Vec<Outcome>) -> Vec<Check> {
    let specs = catalog(cfg);
    let mut checks: Vec<Check> = outcomes
        .into_iter()
        .map(|o| {
            let spec = specs.iter().find(|s| s.name == o.name);
            let (anchor, base, comparison) = match spec {
                Some(s) => (s.anchor, s.tolerance, s.comparison),
                None => ("uncatalogued check", 0.0, Comparison::AtMost),
            };
            let tolerance = cfg.tolerances.get(&o.name).copied().unwrap_or(base) * cfg.tolerance_scale;
            let (computed, expected, error) = match (spec, o.result) {
                (None, _) => (None, 0.0, Some("check missing from the scenario catalog".to_string())),
                (Some(_), Ok((c, e))) => (Some(c), e, None),
                (Some(_), Err(e)) => (None, 0.0, Some(e)),
            };
            let pass = computed.is_some_and(|c| comparison.passes(c, expected, tolerance));
            Check {
                name: o.name,
                anchor: anchor.to_string(),
                computed: computed.filter(|c| c.is_finite()),
                expected,
                tolerance,
                comparison,
                pass,
                error,
            }
        })
        .collect();
    // Catalogued checks that a suite never reached still show up, as failures.
    for spec in &specs {
        if !checks.iter().any(|c| c.name == spec.name) {
            checks.push(Check {
                name: spec.name.clone(),
                anchor: spec.anchor.to_string(),
                computed: None,
                expected: 0.0,
                tolerance: spec.tolerance * cfg.tolerance_scale,
                comparison: spec.comparison,
                pass: false,
                error: Some("check was not produced".into()),
            });
        }
    }
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    checks
}

/// Validates `cfg` and runs its suite. Computation errors become failed
/// checks; only configuration errors abort.
pub fn run_scenario(cfg: ScenarioConfig) -> Result<Report, ConfigError> {
    let cfg = cfg.validated()?;
    let kind = cfg.kind()?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
    let clock = Instant::now();
    let (outcomes, data) = suites::run(kind, &cfg);
    let checks = assemble(&cfg, outcomes);
    let passed = checks.iter().filter(|c| c.pass).count();
    let summary = Summary { total: checks.len(), passed, failed: checks.len() - passed };
    Ok(Report {
        schema: SCHEMA_VERSION,
        scenario: kind,
        pass: !checks.is_empty() && summary.failed == 0,
        summary,
        checks,
        config: cfg,
        timestamp: Timestamp { started_unix_ms: started, runtime_ms: clock.elapsed().as_secs_f64() * 1e3 },
        data,
    })
}

/// Writes `report.json`, `summary.csv` and the scenario data files into
/// `dir`, creating it if needed. Returns the written paths.
pub fn emit_report(report: &Report, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source: io::Error| RunError::Io { path, source }
    };
    let csv_err = |path: &Path| {
        let path = path.to_path_buf();
        move |e: csv::Error| RunError::Io { path, source: io::Error::other(e) }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();

    let path = dir.join("report.json");
    let mut json = serde_json::to_string_pretty(report).map_err(|e| RunError::Io { path: path.clone(), source: e.into() })?;
    json.push('\n');
    fs::write(&path, json).map_err(io_err(&path))?;
    written.push(path);

    let path = dir.join("summary.csv");
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    let mut w = csv::Writer::from_writer(file);
    let sci = |v: f64| format!("{v:.14e}");
    w.write_record(["name", "anchor", "computed", "expected", "tolerance", "comparison", "pass", "error"])
        .map_err(csv_err(&path))?;
    for c in &report.checks {
        let comparison = serde_json::to_value(c.comparison).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        w.write_record([
            c.name.clone(),
            c.anchor.clone(),
            c.computed.map(sci).unwrap_or_default(),
            sci(c.expected),
            sci(c.tolerance),
            comparison,
            if c.pass { "PASS" } else { "FAIL" }.to_string(),
            c.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err(&path))?;
    }
    w.flush().map_err(io_err(&path))?;
    written.push(path);

    let tables = [
        ("fields.csv", &report.data.fields),
        ("characteristic.csv", &report.data.characteristic),
        ("loop.csv", &report.data.loop_data),
    ];
    for (name, table) in tables {
        if let Some(table) = table {
            let path = dir.join(name);
            let file = fs::File::create(&path).map_err(io_err(&path))?;
            table.write_csv(file).map_err(csv_err(&path))?;
            written.push(path);
        }
    }
    Ok(written)
}
