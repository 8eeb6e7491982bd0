//! Fixed-schema result tables and their CSV and JSONL encodings.
//!
//! Floats are written with 17 significant digits (`{:.16e}`); non-finite
//! values become `inf`, `-inf` and `NaN`, quoted in JSONL.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Int,
    Float,
    Bool,
    Str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: Kind,
}

impl Column {
    pub fn new(name: &str, kind: Kind) -> Self {
        Self { name: name.to_string(), kind }
    }
}

/// Builds a column list from `(name, kind)` pairs.
pub fn columns(spec: &[(&str, Kind)]) -> Vec<Column> {
    spec.iter().map(|&(n, k)| Column::new(n, k)).collect()
}

#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Int(a), Self::Int(b)) => a == b,
            (Self::Float(a), Self::Float(b)) => a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()),
            (Self::Bool(a), Self::Bool(b)) => a == b,
            (Self::Str(a), Self::Str(b)) => a == b,
            _ => false,
        }
    }
}

impl Cell {
    fn kind(&self) -> Kind {
        match self {
            Self::Int(_) => Kind::Int,
            Self::Float(_) => Kind::Float,
            Self::Bool(_) => Kind::Bool,
            Self::Str(_) => Kind::Str,
        }
    }

    fn text(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Float(v) => format_float(*v),
            Self::Bool(v) => v.to_string(),
            Self::Str(s) => s.clone(),
        }
    }

    fn json(&self) -> String {
        match self {
            Self::Float(v) if v.is_finite() => format_float(*v),
            Self::Float(v) => format!("\"{}\"", format_float(*v)),
            Self::Str(s) => serde_json::to_string(s).expect("strings serialize"),
            other => other.text(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Self::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Self::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Self::Int(i64::from(v))
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Str(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Str(v)
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn parse_float_text(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "NaN" => Some(f64::NAN),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    /// Appends a row; panics when it does not match the column kinds.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        for (c, col) in row.iter().zip(&self.columns) {
            assert_eq!(c.kind(), col.kind, "column {}", col.name);
        }
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let report = |e: csv::Error| CliError::Report(e.to_string());
        w.write_record(self.columns.iter().map(|c| c.name.as_str())).map_err(report)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text)).map_err(report)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Report(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Report(e.to_string()))
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push('{');
            for (i, (col, cell)) in self.columns.iter().zip(row).enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(&col.name).expect("strings serialize"));
                out.push(':');
                out.push_str(&cell.json());
            }
            out.push_str("}\n");
        }
        out
    }

    /// Parses JSONL records against a fixed schema.
    pub fn parse_jsonl(text: &str, columns: &[Column]) -> Result<Self> {
        let mut table = Self::new(columns.to_vec());
        for (i, line) in text.lines().enumerate() {
            let bad = |m: String| CliError::Report(format!("line {}: {m}", i + 1));
            if line.trim().is_empty() {
                continue;
            }
            let obj: serde_json::Map<String, Value> = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
            if obj.len() != columns.len() {
                return Err(bad(format!("expected {} fields, got {}", columns.len(), obj.len())));
            }
            let mut row = Vec::with_capacity(columns.len());
            for col in columns {
                let v = obj.get(&col.name).ok_or_else(|| bad(format!("missing field {}", col.name)))?;
                let cell = match (col.kind, v) {
                    (Kind::Int, Value::Number(n)) if n.is_i64() => n.as_i64().map(Cell::Int),
                    (Kind::Float, Value::Number(n)) => n.as_f64().map(Cell::Float),
                    (Kind::Float, Value::String(s)) => parse_float_text(s).map(Cell::Float),
                    (Kind::Bool, Value::Bool(b)) => Some(Cell::Bool(*b)),
                    (Kind::Str, Value::String(s)) => Some(Cell::Str(s.clone())),
                    _ => None,
                };
                row.push(cell.ok_or_else(|| bad(format!("field {} is not of type {:?}", col.name, col.kind)))?);
            }
            table.rows.push(row);
        }
        Ok(table)
    }
}
