// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

//! Tabular results with a metadata header, written as CSV or JSON.

use std::io::Write;

use serde_json::{Map, Value};

/// Bumped whenever column names or meanings change.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub meta: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(command: &str, columns: Vec<String>) -> Self {
        let mut meta = Map::new();
        meta.insert("tool".into(), "pblockade".into());
        meta.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        meta.insert("schema".into(), SCHEMA_VERSION.into());
        meta.insert("command".into(), command.into());
        Self {
            meta,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn value(&self, row: usize, name: &str) -> Option<&Value> {
        self.rows.get(row)?.get(self.column(name)?)
    }

    pub fn f64(&self, row: usize, name: &str) -> Option<f64> {
        self.value(row, name)?.as_f64()
    }

    pub fn bool(&self, row: usize, name: &str) -> Option<bool> {
        self.value(row, name)?.as_bool()
    }

    /// All values of one numeric column, `None` for empty cells.
    pub fn f64_column(&self, name: &str) -> Vec<Option<f64>> {
        (0..self.rows.len()).map(|r| self.f64(r, name)).collect()
    }

    /// `{meta, rows}` with each row an object keyed by column name.
    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .cloned()
                        .zip(r.iter().cloned())
                        .collect(),
                )
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(self.meta.clone()));
        doc.insert("rows".into(), Value::Array(rows));
        Value::Object(doc)
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut w, &self.to_json())?;
        writeln!(w)
    }

    /// Metadata as `# key: value` lines, then a header row and data rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), csv::Error> {
        for (k, v) in &self.meta {
            writeln!(w, "# {k}: {v}")?;
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(cell))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Full-precision scientific notation for floats; empty for missing values.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => format!("{:e}", n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// JSON number, or null for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}
