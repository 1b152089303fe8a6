//! Self-describing result documents rendered as an aligned table, CSV or
//! JSON.
//!
//! Every document carries the schema version, tool name and version, the
//! operation and its effective configuration. Nothing time- or
//! host-dependent is included, so identical inputs give identical bytes.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Value};

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "mos-ties";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<I, S>(columns: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub operation: String,
    pub config: Map<String, Value>,
    pub summary: Map<String, Value>,
    pub table: Table,
    /// JSON payload; table and CSV renderings use `summary` and `table`.
    pub result: Value,
}

/// Shortest round-trip decimal representation.
pub fn num(x: f64) -> String {
    x.to_string()
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Document {
    pub fn new(operation: impl Into<String>) -> Self {
        Self {
            operation: operation.into(),
            config: Map::new(),
            summary: Map::new(),
            table: Table::default(),
            result: Value::Null,
        }
    }

    fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("schema_version: {SCHEMA_VERSION}"),
            format!("tool: {TOOL} {TOOL_VERSION}"),
            format!("operation: {}", self.operation),
        ];
        lines.extend(
            self.config
                .iter()
                .map(|(k, v)| format!("config.{k}: {}", scalar(v))),
        );
        lines.extend(
            self.summary
                .iter()
                .map(|(k, v)| format!("summary.{k}: {}", scalar(v))),
        );
        lines
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
            Format::Table => Ok(self.render_table()),
        }
    }

    fn render_json(&self) -> Result<String> {
        let mut doc = Map::new();
        doc.insert("schema_version".into(), SCHEMA_VERSION.into());
        doc.insert("tool".into(), TOOL.into());
        doc.insert("tool_version".into(), TOOL_VERSION.into());
        doc.insert("operation".into(), self.operation.clone().into());
        doc.insert("config".into(), Value::Object(self.config.clone()));
        doc.insert("result".into(), self.result.clone());
        let mut text = serde_json::to_string_pretty(&Value::Object(doc))?;
        text.push('\n');
        Ok(text)
    }

    fn render_csv(&self) -> Result<String> {
        let mut out = String::new();
        for line in self.header_lines() {
            writeln!(out, "# {line}").expect("write to string");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.table.columns)?;
        for row in &self.table.rows {
            w.write_record(row)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }

    fn render_table(&self) -> String {
        let mut out = String::new();
        for line in self.header_lines() {
            writeln!(out, "{line}").expect("write to string");
        }
        out.push('\n');
        let cols = &self.table.columns;
        let widths: Vec<usize> = (0..cols.len())
            .map(|c| {
                self.table
                    .rows
                    .iter()
                    .map(|r| r[c].len())
                    .chain([cols[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_owned()
        };
        writeln!(out, "{}", line(cols)).expect("write to string");
        for row in &self.table.rows {
            writeln!(out, "{}", line(row)).expect("write to string");
        }
        out
    }
}
