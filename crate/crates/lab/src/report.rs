//! Experiment reports and their JSON/CSV forms.
//!
//! Floats are rounded to 12 significant digits when recorded, and JSON
//! objects are written with sorted keys, so emitting the same report twice
//! gives identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot encode report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}`, expected csv or json")),
        }
    }
}

/// Rounds to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

/// The value a measurement is compared against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "provenance", rename_all = "snake_case")]
pub enum Predicted {
    /// Closed form or finite exact computation.
    Analytic { value: f64 },
    /// Truncated series; the limit lies in `[value, value + error_bound]`
    /// (or within `error_bound` of `value` for two-sided bounds).
    TruncatedSum { value: f64, error_bound: f64 },
    NoPrediction,
}

impl Predicted {
    pub fn analytic(value: f64) -> Self {
        Predicted::Analytic { value: round12(value) }
    }

    pub fn truncated(value: f64, error_bound: f64) -> Self {
        Predicted::TruncatedSum {
            value: round12(value),
            error_bound: round12(error_bound),
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Predicted::Analytic { value } | Predicted::TruncatedSum { value, .. } => Some(value),
            Predicted::NoPrediction => None,
        }
    }

    pub fn error_bound(&self) -> f64 {
        match *self {
            Predicted::TruncatedSum { error_bound, .. } => error_bound,
            _ => 0.0,
        }
    }

    fn provenance(&self) -> &'static str {
        match self {
            Predicted::Analytic { .. } => "analytic",
            Predicted::TruncatedSum { .. } => "truncated_sum",
            Predicted::NoPrediction => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub seed: Option<u64>,
    /// Number of windows the statistic was computed from.
    pub windows: u64,
    pub value: f64,
    pub predicted: Predicted,
}

impl Measurement {
    pub fn new(name: impl Into<String>, seed: Option<u64>, windows: u64, value: f64, predicted: Predicted) -> Self {
        Measurement {
            name: name.into(),
            seed,
            windows,
            value: round12(value),
            predicted,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value < threshold`.
    Below,
    /// `value ≤ threshold`.
    AtMost,
    /// `value > threshold`.
    Above,
    /// `value ≥ threshold`.
    AtLeast,
}

impl Comparison {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparison::Below => value < threshold,
            Comparison::AtMost => value <= threshold,
            Comparison::Above => value > threshold,
            Comparison::AtLeast => value >= threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub seed: Option<u64>,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub passed: bool,
}

impl Criterion {
    /// The verdict is taken on the unrounded values.
    pub fn new(name: impl Into<String>, seed: Option<u64>, value: f64, comparison: Comparison, threshold: f64) -> Self {
        Criterion {
            name: name.into(),
            seed,
            passed: comparison.holds(value, threshold),
            value: round12(value),
            comparison,
            threshold: round12(threshold),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub seed: Option<u64>,
    /// `(n, value)` per checkpoint.
    pub points: Vec<(u64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, seed: Option<u64>, points: Vec<(u64, f64)>) -> Self {
        Series {
            name: name.into(),
            seed,
            points: points.into_iter().map(|(n, v)| (n, round12(v))).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub scenario: String,
    pub config: ExperimentConfig,
    pub verdict: String,
    pub measurements: Vec<Measurement>,
    pub criteria: Vec<Criterion>,
    pub series: Vec<Series>,
    pub notes: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn failed_criteria(&self) -> Vec<&Criterion> {
        self.criteria.iter().filter(|c| !c.passed).collect()
    }

    /// First measurement with this name (and seed, when given).
    pub fn measurement(&self, name: &str, seed: Option<u64>) -> Option<&Measurement> {
        self.measurements
            .iter()
            .find(|m| m.name == name && (seed.is_none() || m.seed == seed))
    }

    pub fn measurements_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Measurement> + 'a {
        self.measurements.iter().filter(move |m| m.name == name)
    }

    pub fn criteria_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Criterion> + 'a {
        self.criteria.iter().filter(move |c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        let mut v = serde_json::to_value(self)?;
        round_numbers(&mut v);
        let mut s = serde_json::to_string_pretty(&v)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(s)?)
    }

    /// One row per measurement, then one per criterion.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ReportError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "section",
            "name",
            "seed",
            "value",
            "predicted",
            "provenance",
            "error_bound",
            "comparison",
            "threshold",
            "passed",
        ])?;
        let seed = |s: Option<u64>| s.map_or(String::new(), |s| s.to_string());
        for m in &self.measurements {
            w.write_record([
                "measurement".to_string(),
                m.name.clone(),
                seed(m.seed),
                fmt(m.value),
                m.predicted.value().map_or(String::new(), fmt),
                m.predicted.provenance().to_string(),
                fmt(m.predicted.error_bound()),
                String::new(),
                String::new(),
                String::new(),
            ])?;
        }
        for c in &self.criteria {
            w.write_record([
                "criterion".to_string(),
                c.name.clone(),
                seed(c.seed),
                fmt(c.value),
                String::new(),
                String::new(),
                String::new(),
                serde_json::to_value(c.comparison)?
                    .as_str()
                    .unwrap_or_default()
                    .to_string(),
                fmt(c.threshold),
                c.passed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// One row per checkpoint of every series.
    pub fn write_series_csv<W: Write>(&self, out: W) -> Result<(), ReportError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["series", "seed", "n", "value"])?;
        for s in &self.series {
            for &(n, v) in &s.points {
                w.write_record([
                    s.name.clone(),
                    s.seed.map_or(String::new(), |s| s.to_string()),
                    n.to_string(),
                    fmt(v),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{}: {} ({} criteria, {} failed, {:.1} s)\n",
            self.scenario,
            self.verdict,
            self.criteria.len(),
            self.failed_criteria().len(),
            self.wall_clock_seconds
        );
        for c in &self.criteria {
            let seed = c.seed.map_or(String::new(), |s| format!(" [seed {s}]"));
            out.push_str(&format!(
                "  {} {}{}: {} {} {}\n",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                seed,
                fmt(c.value),
                symbol(c.comparison),
                fmt(c.threshold)
            ));
        }
        out
    }
}

fn symbol(c: Comparison) -> &'static str {
    match c {
        Comparison::Below => "<",
        Comparison::AtMost => "<=",
        Comparison::Above => ">",
        Comparison::AtLeast => ">=",
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.11e}")
}

fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round12).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// Writes `<scenario>.json`, or `<scenario>.csv` and `<scenario>_series.csv`,
/// into `dir`; returns the paths written.
pub fn emit_report(report: &ExperimentReport, format: Format, dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    std::fs::create_dir_all(dir)?;
    match format {
        Format::Json => {
            let path = dir.join(format!("{}.json", report.scenario));
            std::fs::write(&path, report.to_json()?)?;
            Ok(vec![path])
        }
        Format::Csv => {
            let main = dir.join(format!("{}.csv", report.scenario));
            report.write_csv(BufWriter::new(File::create(&main)?))?;
            let series = dir.join(format!("{}_series.csv", report.scenario));
            report.write_series_csv(BufWriter::new(File::create(&series)?))?;
            Ok(vec![main, series])
        }
    }
}
