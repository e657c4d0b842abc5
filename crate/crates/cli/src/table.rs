//! Flat output tables and their CSV and JSON encodings.

use crate::config::Format;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    F(f64),
    I(usize),
    B(bool),
}

impl Cell {
    fn text(&self) -> String {
        match *self {
            Cell::F(x) => sig12(x),
            Cell::I(n) => n.to_string(),
            Cell::B(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match *self {
            Cell::F(x) => match serde_json::Number::from_f64(round12(x)) {
                Some(n) => serde_json::Value::Number(n),
                None => serde_json::Value::String(sig12(x)),
            },
            Cell::I(n) => serde_json::Value::from(n),
            Cell::B(b) => serde_json::Value::Bool(b),
        }
    }
}

fn round12(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal of `x` rounded to 12 significant digits.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let v = round12(x);
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-4..1e12).contains(&a) { v.to_string() } else { format!("{v:e}") }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self { command, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of {}", self.command);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.iter().map(Cell::text).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> =
            self.rows.iter().map(|r| serde_json::Value::Array(r.iter().map(Cell::json).collect())).collect();
        let doc = serde_json::json!({ "command": self.command, "columns": self.columns, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
