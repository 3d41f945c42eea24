//! Self-describing CSV and JSON writers.
//!
//! Every file starts with the command name and the effective flags, so the
//! header alone is enough to regenerate the file. Doubles are written in
//! shortest round-trip form.

use std::io::Write;

use clap::ValueEnum;
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Shortest decimal that parses back to the same double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Num(x) => fmt_f64(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(n) => Value::from(*n),
            Cell::Num(x) => Value::from(*x),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub enum Body {
    Table(Table),
    Record(Map<String, Value>),
}

/// What an analysis hands back to the dispatcher.
#[derive(Debug, Clone)]
pub struct Report {
    pub body: Body,
    /// Extra `#` lines after the flags, e.g. a legend.
    pub notes: Vec<String>,
    /// `false` makes the process exit with status 1 after writing.
    pub success: bool,
}

impl Report {
    pub fn table(table: Table) -> Self {
        Report {
            body: Body::Table(table),
            notes: Vec::new(),
            success: true,
        }
    }

    /// A record from any serialisable value that serialises to a JSON object.
    pub fn record<T: serde::Serialize>(value: &T) -> Result<Self, CliError> {
        match serde_json::to_value(value)? {
            Value::Object(map) => Ok(Report {
                body: Body::Record(map),
                notes: Vec::new(),
                success: true,
            }),
            other => {
                let mut map = Map::new();
                map.insert("value".into(), other);
                Ok(Report {
                    body: Body::Record(map),
                    notes: Vec::new(),
                    success: true,
                })
            }
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        if let Body::Record(map) = &mut self.body {
            map.insert(key.to_string(), value.into());
        }
        self
    }

    pub fn note(mut self, line: impl Into<String>) -> Self {
        self.notes.push(line.into());
        self
    }
}

/// Command name plus effective flags, in declaration order. Flags without
/// a value are switches that were set.
#[derive(Debug, Clone)]
pub struct Header {
    pub command: String,
    pub flags: Vec<(String, Option<String>)>,
}

impl Header {
    fn lines(&self) -> Vec<String> {
        let mut lines = vec![format!("ewa {}", self.command)];
        for (name, value) in &self.flags {
            lines.push(match value {
                Some(v) => format!("--{name}={v}"),
                None => format!("--{name}"),
            });
        }
        lines
    }

    fn params(&self) -> Map<String, Value> {
        self.flags
            .iter()
            .map(|(name, value)| {
                let v = value
                    .as_ref()
                    .map_or(Value::Bool(true), |v| Value::from(v.as_str()));
                (name.clone(), v)
            })
            .collect()
    }
}

/// Flatten nested JSON into `key.sub[i]` paths for two-column CSV records.
fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, out);
            }
        }
        Value::Number(n) => out.push((
            prefix.to_string(),
            n.as_f64().map_or_else(
                || n.to_string(),
                |x| {
                    if n.is_f64() {
                        fmt_f64(x)
                    } else {
                        n.to_string()
                    }
                },
            ),
        )),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Null => out.push((prefix.to_string(), String::new())),
    }
}

pub fn write_report(
    out: &mut dyn Write,
    header: &Header,
    report: &Report,
    format: Format,
) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(out, header, report),
        Format::Json => write_json(out, header, report),
    }
}

fn write_csv(out: &mut dyn Write, header: &Header, report: &Report) -> Result<(), CliError> {
    for line in header.lines().iter().chain(&report.notes) {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    match &report.body {
        Body::Table(t) => {
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
        }
        Body::Record(map) => {
            let mut pairs = Vec::new();
            flatten("", &Value::Object(map.clone()), &mut pairs);
            w.write_record(["key", "value"])?;
            for (k, v) in pairs {
                w.write_record([k, v])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn write_json(out: &mut dyn Write, header: &Header, report: &Report) -> Result<(), CliError> {
    let mut doc = Map::new();
    doc.insert("command".into(), Value::from(header.command.as_str()));
    doc.insert("params".into(), Value::Object(header.params()));
    if !report.notes.is_empty() {
        doc.insert("notes".into(), Value::from(report.notes.clone()));
    }
    match &report.body {
        Body::Table(t) => {
            doc.insert("columns".into(), Value::from(t.columns.clone()));
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                .collect();
            doc.insert("rows".into(), Value::Array(rows));
            serde_json::to_writer(&mut *out, &Value::Object(doc))?;
        }
        Body::Record(map) => {
            for (k, v) in map {
                doc.insert(k.clone(), v.clone());
            }
            serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
        }
    }
    writeln!(out)?;
    Ok(())
}
