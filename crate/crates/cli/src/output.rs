use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

/// One CSV field.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Empty,
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v.into())
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v.into())
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Floats carry 17 significant digits so they round-trip exactly.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|h| h.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> std::io::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }
}

pub fn manifest(subcommand: &str, flags: Value, seed: Option<u64>, l1: &str, l2: &str, output: Option<&Path>) -> Value {
    json!({
        "subcommand": subcommand,
        "flags": flags,
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
        "geometry": { "l1": l1, "l2": l2 },
        "timestamp": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        "output": output.map(|p| p.display().to_string()),
    })
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Writes the CSV to `out` (or stdout) and the manifest next to it (or to stderr).
pub fn emit(table: &Table, manifest: &Value, out: Option<&Path>, manifest_at: Option<&Path>) -> std::io::Result<()> {
    let csv = table.to_csv()?;
    let mut doc = serde_json::to_string_pretty(manifest).map_err(std::io::Error::other)?;
    doc.push('\n');
    match out {
        Some(p) => std::fs::write(p, &csv)?,
        None => std::io::stdout().lock().write_all(&csv)?,
    }
    let target = manifest_at.map(Path::to_path_buf).or_else(|| out.map(manifest_path));
    match target {
        Some(p) => std::fs::write(p, doc),
        None => std::io::stderr().lock().write_all(doc.as_bytes()),
    }
}
