//! Tabular results in CSV and JSON.
//!
//! CSV: UTF-8, comma separated, `.` decimal point, one header row. Undefined
//! values are empty cells. Floats are written in Rust's shortest round-trip
//! form so a reloaded file reproduces the exact values.
//!
//! JSON: `{"metadata": {..}, "columns": [..], "records": [{column: value}]}`
//! with undefined values as `null`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::sweep::SweepResult;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(i) => Some(i as f64),
            Cell::Float(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) => f.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(f) => json!(f),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }

    fn from_json(v: &Value) -> Cell {
        match v {
            Value::Null => Cell::Missing,
            Value::Bool(b) => Cell::Bool(*b),
            Value::Number(n) => match n.as_i64() {
                Some(i) if !n.is_f64() => Cell::Int(i),
                _ => Cell::Float(n.as_f64().unwrap_or(f64::NAN)),
            },
            Value::String(s) => Cell::Text(s.clone()),
            other => Cell::Text(other.to_string()),
        }
    }

    fn from_csv(s: &str) -> Cell {
        if s.is_empty() {
            Cell::Missing
        } else if let Ok(i) = i64::from_str(s) {
            Cell::Int(i)
        } else if let Ok(f) = f64::from_str(s) {
            Cell::Float(f)
        } else if let Ok(b) = bool::from_str(s) {
            Cell::Bool(b)
        } else {
            Cell::Text(s.to_string())
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::validation("format", format!("expected csv or json, got `{other}`"))),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Written as the JSON `metadata` block; CSV carries the same facts in columns.
    pub metadata: Value,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        ResultTable { columns, rows: Vec::new(), metadata: Value::Null }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

pub fn write_results(table: &ResultTable, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    if table.rows.is_empty() {
        return Err(Error::InvalidArgument("refusing to write an empty result table".into()));
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
            w.write_record(&table.columns).map_err(|e| csv_error(path, e))?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::to_csv)).map_err(|e| csv_error(path, e))?;
            }
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        Format::Json => {
            let records: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = table
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::to_json))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            let doc = json!({
                "metadata": table.metadata,
                "columns": table.columns,
                "records": records,
            });
            let file = File::create(path).map_err(|e| Error::io(path, e))?;
            let mut w = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| format_error(path, e))?;
            writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))?;
        }
    }
    Ok(())
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        if let csv::ErrorKind::Io(io) = e.into_kind() {
            return Error::io(path, io);
        }
        unreachable!()
    }
    format_error(path, e)
}

fn format_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Format { path: path.to_path_buf(), message: e.to_string() }
}

pub fn read_results_json(path: impl AsRef<Path>) -> Result<ResultTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| format_error(path, e))?;
    let columns: Vec<String> = doc["columns"]
        .as_array()
        .ok_or_else(|| format_error(path, "missing `columns` array"))?
        .iter()
        .map(|c| c.as_str().map(str::to_string).ok_or_else(|| format_error(path, "non-string column name")))
        .collect::<Result<_>>()?;
    let records = doc["records"]
        .as_array()
        .ok_or_else(|| format_error(path, "missing `records` array"))?;
    let rows = records
        .iter()
        .map(|r| columns.iter().map(|c| Cell::from_json(&r[c.as_str()])).collect())
        .collect();
    Ok(ResultTable { columns, rows, metadata: doc["metadata"].clone() })
}

pub fn read_results_csv(path: impl AsRef<Path>) -> Result<ResultTable> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let columns = r
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut table = ResultTable::new(columns);
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        table.rows.push(rec.iter().map(Cell::from_csv).collect());
    }
    Ok(table)
}

/// Metadata block shared by every output: version, master seed, effective configuration.
pub fn run_metadata(master_seed: u64, config: &impl Serialize) -> Value {
    json!({
        "generator": concat!("endonet ", env!("CARGO_PKG_VERSION")),
        "master_seed": master_seed,
        "config": config,
    })
}

fn compact(config: &impl Serialize) -> String {
    serde_json::to_string(config).expect("configs always serialize")
}

/// One row per (grid point, metric).
pub fn sweep_aggregate_table(result: &SweepResult, metadata: Value) -> ResultTable {
    let mut table = ResultTable::new(
        [
            "point", "grid", "metric", "replications", "defined", "mean", "std", "undefined", "single_sample",
            "master_seed", "config",
        ]
        .map(String::from)
        .to_vec(),
    );
    table.metadata = metadata;
    for row in &result.rows {
        let point = &result.points[row.point];
        table.push(vec![
            Cell::Int(row.point as i64),
            Cell::Text(row.label.clone()),
            Cell::Text(row.metric.clone()),
            Cell::Int(row.replications as i64),
            Cell::Int(row.defined as i64),
            row.mean.into(),
            row.std.into(),
            Cell::Int(row.undefined as i64),
            Cell::Bool(row.single_sample),
            Cell::Text(point.config.master_seed().to_string()),
            Cell::Text(compact(&point.config)),
        ]);
    }
    table
}

/// One row per replication, one column per metric.
pub fn sweep_records_table(result: &SweepResult, metadata: Value) -> ResultTable {
    let mut columns: Vec<String> = vec!["point".into(), "grid".into(), "replication".into()];
    columns.extend(result.metrics.iter().cloned());
    columns.extend(["master_seed".into(), "config".into()]);
    let mut table = ResultTable::new(columns);
    table.metadata = metadata;
    for rec in &result.records {
        let point = &result.points[rec.point];
        let mut row = vec![
            Cell::Int(rec.point as i64),
            Cell::Text(point.label()),
            Cell::Int(rec.replication as i64),
        ];
        row.extend(rec.values.iter().map(|&v| Cell::from(v)));
        row.push(Cell::Text(point.config.master_seed().to_string()));
        row.push(Cell::Text(compact(&point.config)));
        table.push(row);
    }
    table
}
