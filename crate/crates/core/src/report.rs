//! Deterministic report documents: a JSON file with the resolved config and
//! a CSV file with the same rows.
//!
//! Floats are rounded to 15 significant digits and printed in shortest
//! round-trip form, object keys are sorted, and wall-clock time is left
//! out unless asked for, so two runs of the same config produce identical
//! bytes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cache::write_file_atomic;
use crate::moments::MomentReport;
use crate::{Error, Result};

pub const REPORT_SCHEMA: &str = "symsq-report/1";
pub const SIGNIFICANT_DIGITS: usize = 15;

pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell_text).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

/// One report: named columns, rows of JSON scalars, and free-form summary
/// fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub experiment: String,
    /// Ordered `(key, value)` pairs that make up the file name.
    pub name_parts: Vec<(String, String)>,
    pub config: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub summary: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(experiment: &str, config: BTreeMap<String, String>) -> Self {
        Report {
            schema: REPORT_SCHEMA.to_string(),
            experiment: experiment.to_string(),
            name_parts: Vec::new(),
            config,
            columns: Vec::new(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    pub fn name_part(mut self, key: &str, value: impl ToString) -> Self {
        self.name_parts.push((key.to_string(), value.to_string()));
        self
    }

    pub fn with_columns(mut self, columns: &[&str]) -> Self {
        self.columns = columns.iter().map(|c| c.to_string()).collect();
        self
    }

    /// Append a row of serializable cells; floats are rounded.
    pub fn push_row(&mut self, cells: Vec<Value>) -> Result<()> {
        if cells.len() != self.columns.len() {
            return Err(Error::invalid(format!("row has {} cells, report has {} columns", cells.len(), self.columns.len())));
        }
        self.rows.push(cells.into_iter().map(round_value).collect());
        Ok(())
    }

    pub fn set_summary(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("summary value serializes");
        self.summary.insert(key.to_string(), round_value(v));
    }

    /// `experiment_K40_a0.3_r1_bump_1_2` style stem.
    pub fn file_stem(&self) -> String {
        let mut stem = self.experiment.clone();
        for (k, v) in &self.name_parts {
            stem.push('_');
            stem.push_str(k);
            stem.push_str(v);
        }
        stem.chars().map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' }).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&serde_json::to_value(self).expect("report serializes"))
            .expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { path: PathBuf::from("<report>"), message: e.to_string() })
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory csv");
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text)).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }

    /// Write `<stem>.json` and `<stem>.csv` under `dir`.
    pub fn emit(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let stem = self.file_stem();
        let json = dir.join(format!("{stem}.json"));
        let csv = dir.join(format!("{stem}.csv"));
        write_file_atomic(&json, self.to_json().as_bytes())?;
        write_file_atomic(&csv, self.to_csv().as_bytes())?;
        Ok((json, csv))
    }
}

pub const MOMENT_COLUMNS: [&str; 11] = [
    "experiment",
    "K",
    "a",
    "r",
    "h",
    "empirical",
    "main_term",
    "relative_deviation",
    "forms_count",
    "weights_used",
    "runtime_seconds",
];

/// A report with one row per moment cell. Runtime is written only when
/// `include_runtime` is set.
pub fn moment_report(
    experiment: &str,
    cells: &[MomentReport],
    config: BTreeMap<String, String>,
    include_runtime: bool,
) -> Result<Report> {
    let first = cells.first().ok_or_else(|| Error::invalid("a report needs at least one cell"))?;
    let join = |xs: Vec<String>| {
        let mut xs = xs;
        xs.dedup();
        xs.join("-")
    };
    let mut report = Report::new(experiment, config)
        .name_part("K", join(cells.iter().map(|c| fmt_param(c.k_scale)).collect()))
        .name_part("a", first.a.map_or("none".to_string(), fmt_param))
        .name_part("r", join(cells.iter().map(|c| c.r.to_string()).collect()))
        .name_part("_", &first.h)
        .with_columns(&MOMENT_COLUMNS);
    report.name_parts.last_mut().expect("just pushed").0 = String::new();
    for c in cells {
        report.push_row(vec![
            Value::from(c.experiment.clone()),
            Value::from(c.k_scale),
            c.a.map_or(Value::Null, Value::from),
            Value::from(c.r),
            Value::from(c.h.clone()),
            Value::from(c.empirical),
            Value::from(c.main_term),
            Value::from(c.relative_deviation),
            Value::from(c.forms_count as u64),
            Value::from(c.weights_used.iter().map(|&k| Value::from(k)).collect::<Vec<_>>()),
            if include_runtime { Value::from(c.runtime_seconds) } else { Value::Null },
        ])?;
    }
    Ok(report)
}

/// Parameters in file names: shortest round-trip form.
pub fn fmt_param(x: f64) -> String {
    let r = round_significant(x);
    if r.fract() == 0.0 && r.abs() < 1e15 { format!("{}", r as i64) } else { format!("{r}") }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(k: f64, r: u64, e: f64) -> MomentReport {
        MomentReport {
            experiment: "first".into(),
            k_scale: k,
            a: None,
            r,
            h: "bump_1_2".into(),
            empirical: e,
            main_term: 1.0 / 3.0,
            relative_deviation: (e - 1.0 / 3.0).abs() * 3.0,
            weights_used: vec![42, 44],
            forms_count: 7,
            runtime_seconds: 1.234567,
        }
    }

    #[test]
    fn rounding() {
        assert_eq!(round_significant(1.0 / 3.0), 0.333333333333333);
        assert_eq!(round_significant(-2.0f64.sqrt()), -1.41421356237310);
        assert_eq!(round_significant(6.02214076e-200), 6.02214076e-200);
        assert_eq!(round_significant(0.0), 0.0);
        assert_eq!(round_significant(round_significant(std::f64::consts::PI)), round_significant(std::f64::consts::PI));
    }

    #[test]
    fn round_trip_and_shape() {
        let cells = [cell(40.0, 1, 0.1), cell(40.0, 2, std::f64::consts::E), cell(80.0, 1, 2.0)];
        let mut config = BTreeMap::new();
        config.insert("moments.K".to_string(), "40".to_string());
        let r = moment_report("moments", &cells, config, false).unwrap();
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
        assert_eq!(r.to_csv().lines().count(), 1 + cells.len());
        assert!(r.to_json().contains("\"schema\": \"symsq-report/1\""));
        assert!(r.to_json().contains("2.71828182845905"));
        assert!(!r.to_json().contains("1.234567"));
        assert_eq!(r.file_stem(), "moments_K40-80_anone_r1-2-1_bump_1_2");
        let with_time = moment_report("moments", &cells, BTreeMap::new(), true).unwrap();
        assert!(with_time.to_csv().contains("1.234567"));
    }

    #[test]
    fn emit_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let r = moment_report("first", &[cell(40.0, 1, 0.5)], BTreeMap::new(), false).unwrap();
        let (j, c) = r.emit(dir.path()).unwrap();
        let (a, b) = (std::fs::read(&j).unwrap(), std::fs::read(&c).unwrap());
        r.emit(dir.path()).unwrap();
        assert_eq!(std::fs::read(&j).unwrap(), a);
        assert_eq!(std::fs::read(&c).unwrap(), b);
        assert!(matches!(r.emit(&j.join("sub")), Err(Error::Io { .. })));
    }
}
