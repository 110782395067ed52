// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.15e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => json!(x),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&'static str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Header key/value pairs plus one or more tables.
///
/// CSV output writes the header as `# key = value` lines, the first table
/// directly, and later tables after a `# table: <name>` marker. JSON output
/// carries the same content as `{"header": {...}, "tables": {...}}`.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub header: Vec<(String, String)>,
    pub tables: Vec<Table>,
    pub footer: Vec<(String, String)>,
}

impl Report {
    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.header.push((key.to_string(), value.to_string()));
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.footer.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => {
                let header: Map<String, Value> = self
                    .header
                    .iter()
                    .chain(&self.footer)
                    .map(|(k, v)| (k.clone(), json!(v)))
                    .collect();
                let tables: Map<String, Value> = self
                    .tables
                    .iter()
                    .map(|t| {
                        let rows: Vec<Value> = t
                            .rows
                            .iter()
                            .map(|r| {
                                let m: Map<String, Value> = t
                                    .columns
                                    .iter()
                                    .zip(r)
                                    .map(|(c, v)| (c.to_string(), v.json()))
                                    .collect();
                                Value::Object(m)
                            })
                            .collect();
                        (t.name.clone(), Value::Array(rows))
                    })
                    .collect();
                let doc = json!({ "header": header, "tables": tables });
                serde_json::to_string_pretty(&doc)
                    .map(|s| s + "\n")
                    .map_err(|e| Error::Parse(e.to_string()))
            }
        }
    }

    fn csv(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.header {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push_str(&format!("# table: {}\n", t.name));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Parse(e.to_string());
            w.write_record(&t.columns).map_err(io)?;
            for r in &t.rows {
                w.write_record(r.iter().map(Cell::csv)).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
            out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))?);
        }
        for (k, v) in &self.footer {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        Ok(out)
    }
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::Parse(format!("cannot write output: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::default();
        r.meta("tau", "1/5J12");
        let mut t = Table::new("iterations", &["k", "f"]);
        t.push(vec![1usize.into(), 0.5.into()]);
        t.push(vec![2usize.into(), None.into()]);
        r.tables.push(t);
        let mut s = Table::new("state", &["basis", "amp"]);
        s.push(vec!["|000>".into(), 1.0.into()]);
        r.tables.push(s);
        r.note("done", true);
        r
    }

    #[test]
    fn csv_layout() {
        let text = sample().render(Format::Csv).unwrap();
        let expected = "# tau = 1/5J12\nk,f\n1,5.000000000000000e-1\n2,\n# table: state\nbasis,amp\n|000>,1.000000000000000e0\n# done = true\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn json_mirrors_csv() {
        let text = sample().render(Format::Json).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["header"]["tau"], "1/5J12");
        assert_eq!(v["tables"]["iterations"][0]["f"], 0.5);
        assert!(v["tables"]["iterations"][1]["f"].is_null());
        assert_eq!(v["tables"]["state"][0]["basis"], "|000>");
    }
}
