//! Trial records, aggregate statistics and report files.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::config::{Format, ScenarioConfig, ScenarioKind};
use crate::CliError;

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn ser_sig<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(sig12(*x))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Field {
    /// Numeric view used for aggregation: booleans count as 0/1.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Field::Num(x) => Some(*x),
            Field::Int(i) => Some(*i as f64),
            Field::Bool(b) => Some(f64::from(u8::from(*b))),
            Field::Text(_) | Field::Missing => None,
        }
    }

    fn csv_cell(&self) -> String {
        match self {
            Field::Num(x) => sig12(*x).to_string(),
            Field::Int(i) => i.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Text(t) => t.clone(),
            Field::Missing => String::new(),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Field::Num(x) if x.is_finite() => s.serialize_f64(sig12(*x)),
            Field::Num(_) | Field::Missing => s.serialize_none(),
            Field::Int(i) => s.serialize_i64(*i),
            Field::Bool(b) => s.serialize_bool(*b),
            Field::Text(t) => s.serialize_str(t),
        }
    }
}

/// One trial's named values, in column order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record {
    pub fields: Vec<(&'static str, Field)>,
}

impl Record {
    pub fn new(trial: usize) -> Self {
        Self { fields: vec![("trial", Field::Int(trial as i64))] }
    }

    pub fn num(mut self, name: &'static str, v: f64) -> Self {
        self.fields.push((name, Field::Num(v)));
        self
    }

    pub fn int(mut self, name: &'static str, v: impl TryInto<i64>) -> Self {
        let v = v.try_into().map(Field::Int).unwrap_or(Field::Missing);
        self.fields.push((name, v));
        self
    }

    pub fn flag(mut self, name: &'static str, v: bool) -> Self {
        self.fields.push((name, Field::Bool(v)));
        self
    }

    pub fn text(mut self, name: &'static str, v: impl Into<String>) -> Self {
        self.fields.push((name, Field::Text(v.into())));
        self
    }

    pub fn opt_num(mut self, name: &'static str, v: Option<f64>) -> Self {
        self.fields.push((name, v.map_or(Field::Missing, Field::Num)));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Field> {
        self.fields.iter().find(|(n, _)| *n == name).map(|(_, f)| f)
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.fields.len()))?;
        for (k, v) in &self.fields {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// Sample mean with a normal-approximation 95% half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    #[serde(serialize_with = "ser_sig")]
    pub mean: f64,
    #[serde(serialize_with = "ser_sig")]
    pub half_width_95: f64,
    pub n: usize,
}

impl Aggregate {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let half_width_95 = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            1.96 * (var / n as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, half_width_95, n })
    }
}

/// Per-column aggregates over every numeric or boolean field except the
/// trial index; trials where a field is missing are skipped.
pub fn aggregate(records: &[Record]) -> BTreeMap<String, Aggregate> {
    let mut columns: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in records {
        for (name, f) in &r.fields {
            if *name == "trial" {
                continue;
            }
            if let Some(x) = f.as_f64().filter(|x| x.is_finite()) {
                columns.entry(name).or_default().push(x);
            }
        }
    }
    columns
        .into_iter()
        .filter_map(|(k, v)| Aggregate::of(&v).map(|a| (k.to_string(), a)))
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResourceTotals {
    pub epr_pairs: u64,
    pub classical_bits: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    Config,
    Entropy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub seed_source: SeedSource,
    pub trials: usize,
    /// Scenario keys as run, defaults included.
    pub config: BTreeMap<String, String>,
    pub aggregates: BTreeMap<String, Aggregate>,
    /// Summed over trials, for scenarios that consume entanglement.
    pub resources: Option<ResourceTotals>,
    pub aborted_trials: usize,
    pub records: Vec<Record>,
}

impl TrialReport {
    pub fn new(config: &ScenarioConfig, seed: u64, seed_source: SeedSource, records: Vec<Record>) -> Self {
        let sum = |name: &str| -> Option<u64> {
            records
                .iter()
                .map(|r| r.get(name).and_then(Field::as_f64).map(|x| x as u64))
                .sum()
        };
        let resources = match (sum("epr_pairs"), sum("cbits")) {
            (Some(epr_pairs), Some(classical_bits)) => Some(ResourceTotals { epr_pairs, classical_bits }),
            _ => None,
        };
        let aborted_trials = records
            .iter()
            .filter(|r| matches!(r.get("aborted"), Some(Field::Bool(true))))
            .count();
        Self {
            scenario: config.scenario,
            seed,
            seed_source,
            trials: records.len(),
            config: config.params.clone(),
            aggregates: aggregate(&records),
            resources,
            aborted_trials,
            records,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per trial under a header row.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let header: Vec<&str> = self.records.first().map(|r| r.fields.iter().map(|(n, _)| *n).collect()).unwrap_or_default();
        w.write_record(&header).map_err(csv_error)?;
        for r in &self.records {
            w.write_record(r.fields.iter().map(|(_, f)| f.csv_cell())).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Output(format!("csv: {e}"))
}

/// Writes `contents` to a temporary file beside `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io { path: path.to_path_buf(), source: e };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn emit_report(report: &TrialReport, format: Format, path: &Path) -> Result<(), CliError> {
    write_atomic(path, &report.render(format)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.1 + 0.2), 0.3);
        assert_eq!(sig12(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(123456789.123456789), 123456789.123);
    }

    #[test]
    fn aggregates_skip_text_and_missing() {
        let recs = vec![
            Record::new(0).num("x", 1.0).text("t", "a").flag("ok", true).opt_num("f", None),
            Record::new(1).num("x", 3.0).text("t", "b").flag("ok", false).opt_num("f", Some(0.5)),
        ];
        let a = aggregate(&recs);
        assert_eq!(a["x"].mean, 2.0);
        assert_eq!(a["ok"].mean, 0.5);
        assert_eq!(a["f"].n, 1);
        assert!(!a.contains_key("t") && !a.contains_key("trial"));
        assert!((a["x"].half_width_95 - 1.96).abs() < 1e-12);
    }
}
