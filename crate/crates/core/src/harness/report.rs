//! Check records and the versioned report written by every command.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::anchors::PLUMBING;
use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// One measured quantity compared against a bound.
///
/// `margin` is signed so that positive means room to spare; a check passes
/// iff `margin ≥ −tolerance`. A negative tolerance demands a strictly
/// positive margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    fn build(
        name: &str,
        anchor: &str,
        value: f64,
        bound: f64,
        margin: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            name: name.to_string(),
            anchor: anchor.to_string(),
            // `+ 0.0` turns a negative zero into a positive one.
            value: value + 0.0,
            bound: bound + 0.0,
            margin: margin + 0.0,
            tolerance,
            pass: margin >= -tolerance,
            detail: String::new(),
        }
    }

    /// `value ≤ bound`.
    pub fn at_most(name: &str, anchor: &str, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::build(name, anchor, value, bound, bound - value, tolerance)
    }

    /// `value ≥ bound`.
    pub fn at_least(name: &str, anchor: &str, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::build(name, anchor, value, bound, value - bound, tolerance)
    }

    /// `|value − bound| ≤ tolerance`.
    pub fn close(name: &str, anchor: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Self::build(
            name,
            anchor,
            value,
            target,
            -(value - target).abs(),
            tolerance,
        )
    }

    /// Boolean outcome: value 1 or 0 against bound 1.
    pub fn holds(name: &str, anchor: &str, ok: bool) -> Self {
        Self::build(
            name,
            anchor,
            ok as u8 as f64,
            1.0,
            if ok { 0.0 } else { -1.0 },
            0.0,
        )
    }

    /// A measured constant with nothing to compare against; always passes.
    pub fn logged(name: &str, anchor: &str, value: f64) -> Self {
        Self::build(name, anchor, value, value, 0.0, 0.0)
    }

    /// A stage that errored: recorded as a failing plumbing record.
    pub fn failed(name: &str, err: &Error) -> Self {
        Self::holds(name, PLUMBING, false).with_detail(err.to_string())
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Keeps the worst case of many sub-checks sharing one name and anchor.
#[derive(Clone, Debug)]
pub struct Worst {
    name: String,
    anchor: String,
    tolerance: f64,
    upper: bool,
    worst: Option<(f64, f64, f64)>,
    count: usize,
}

impl Worst {
    pub fn at_most(name: &str, anchor: &str, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            tolerance,
            upper: true,
            worst: None,
            count: 0,
        }
    }

    pub fn at_least(name: &str, anchor: &str, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            tolerance,
            upper: false,
            worst: None,
            count: 0,
        }
    }

    pub fn push(&mut self, value: f64, bound: f64) {
        let margin = if self.upper {
            bound - value
        } else {
            value - bound
        };
        let margin = if margin.is_nan() {
            f64::NEG_INFINITY
        } else {
            margin
        };
        self.count += 1;
        if self.worst.is_none_or(|(_, _, m)| margin < m) {
            self.worst = Some((value, bound, margin));
        }
    }

    pub fn finish(self) -> Check {
        let (value, bound, margin) = self.worst.unwrap_or((0.0, 0.0, f64::NEG_INFINITY));
        let mut c = Check::build(
            &self.name,
            &self.anchor,
            value,
            bound,
            margin,
            self.tolerance,
        );
        c.detail = format!("worst of {}", self.count);
        c
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: ExperimentConfig,
    /// Resolved parameters actually used.
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Extra CSV tables keyed by file stem.
    #[serde(skip)]
    pub tables: BTreeMap<String, Vec<u8>>,
    pub passed: bool,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config: config.clone(),
            parameters: BTreeMap::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            tables: BTreeMap::new(),
            passed: true,
            wall_clock_seconds: 0.0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(key.to_string(), v);
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    /// Appends the checks of a stage, or one failing record if it errored.
    pub fn stage(&mut self, name: &str, result: Result<Vec<Check>>) {
        match result {
            Ok(checks) => self.extend(checks),
            Err(e) => self.push(Check::failed(name, &e)),
        }
    }

    pub fn finish(&mut self, seconds: f64) {
        self.passed = self.checks.iter().all(|c| c.pass);
        self.wall_clock_seconds = seconds;
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn checks_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "name",
            "anchor",
            "value",
            "bound",
            "margin",
            "tolerance",
            "pass",
            "detail",
        ])?;
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                c.anchor.clone(),
                format!("{:e}", c.value),
                format!("{:e}", c.bound),
                format!("{:e}", c.margin),
                format!("{:e}", c.tolerance),
                c.pass.to_string(),
                c.detail.clone(),
            ])?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    /// Writes `report.json`, `checks.csv` and one CSV per extra table.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let json = dir.join("report.json");
        let mut f = std::fs::File::create(&json)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        f.write_all(b"\n")?;
        written.push(json);
        let checks = dir.join("checks.csv");
        std::fs::write(&checks, self.checks_csv()?)?;
        written.push(checks);
        for (stem, bytes) in &self.tables {
            let p = dir.join(format!("{stem}.csv"));
            std::fs::write(&p, bytes)?;
            written.push(p);
        }
        Ok(written)
    }
}
