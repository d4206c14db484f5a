//! Result tables and their CSV / JSON encodings.

use serde_json::{Map, Number, Value};

use crate::config::{OutputFormat, RunConfig, EMBED_MARKER};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Run metadata written ahead of the configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub command: String,
    pub timestamp: Option<u64>,
}

fn metadata_lines(meta: &Metadata) -> Vec<String> {
    let mut lines = vec![
        format!("{EMBED_MARKER} {}", env!("CARGO_PKG_VERSION")),
        format!("; command = {}", meta.command),
    ];
    if let Some(t) = meta.timestamp {
        lines.push(format!("; timestamp = {t}"));
    }
    lines
}

pub fn render(table: &Table, cfg: &RunConfig, meta: &Metadata) -> Result<Vec<u8>> {
    match cfg.format {
        OutputFormat::Csv => render_csv(table, cfg, meta),
        OutputFormat::Json => render_json(table, cfg, meta),
    }
}

fn render_csv(table: &Table, cfg: &RunConfig, meta: &Metadata) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    for line in metadata_lines(meta)
        .iter()
        .map(String::as_str)
        .chain(cfg.render().lines())
    {
        if line.is_empty() {
            buf.extend_from_slice(b"#\n");
        } else {
            buf.extend_from_slice(format!("# {line}\n").as_bytes());
        }
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(&mut buf);
    let csv_err = |e: csv::Error| CliError::io("csv buffer", std::io::Error::other(e));
    w.write_record(&table.columns).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io("csv buffer", e))?;
    drop(w);
    Ok(buf)
}

fn render_json(table: &Table, cfg: &RunConfig, meta: &Metadata) -> Result<Vec<u8>> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
            Value::Object(obj)
        })
        .collect();
    let mut config = metadata_lines(meta).join("\n");
    config.push('\n');
    config.push_str(&cfg.render());
    let mut top = Map::new();
    top.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    top.insert("command".into(), Value::from(meta.command.clone()));
    top.insert("seed".into(), Value::from(cfg.seed));
    if let Some(t) = meta.timestamp {
        top.insert("timestamp".into(), Value::from(t));
    }
    top.insert("config".into(), Value::from(config));
    top.insert("rows".into(), Value::Array(rows));
    let mut out = serde_json::to_vec_pretty(&Value::Object(top)).expect("JSON values serialize");
    out.push(b'\n');
    Ok(out)
}
