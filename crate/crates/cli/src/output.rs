//! Output assembly: 12-significant-digit number formatting, the common
//! header envelope (version, timestamp, effective config), CSV and JSON
//! rendering, and atomic file writes.
//!
//! Identical configs must produce byte-identical data sections; the
//! timestamp line is the single sanctioned difference between re-runs.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::config::Format;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Formats with 12 significant digits: fixed notation over a wide middle
/// range, scientific outside it. Stable across runs by construction.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        // Covers -0.0 as well; the sign of a zero is numerical noise.
        return "0.00000000000".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        let prec = (11 - mag).max(0) as usize;
        format!("{x:.prec$}")
    } else {
        format!("{x:.11e}")
    }
}

/// JSON mirror of [`fmt_sig`]: the value rounded to 12 significant digits,
/// `null` for non-finite values.
pub fn json_number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = fmt_sig(x).parse().unwrap_or(x);
    json!(rounded)
}

pub fn unix_seconds() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// One table cell; numbers render through the 12-digit formatter in both
/// output formats.
#[derive(Clone, Debug)]
pub enum Cell {
    Text(String),
    Int(u64),
    Num(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(n) => n.to_string(),
            Cell::Num(x) => fmt_sig(*x),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => json!(s),
            Cell::Int(n) => json!(n),
            Cell::Num(x) => json_number(*x),
        }
    }
}

/// A rectangular result table with the standard envelope. `footer` carries
/// per-run summary values (fit slopes, pass/fail verdicts) that belong next
/// to the data without being rows of it.
pub struct Table {
    pub command: &'static str,
    pub config: Vec<(&'static str, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub footer: Vec<(&'static str, Cell)>,
}

impl Table {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# xychain v{VERSION}\n"));
        out.push_str(&format!("# generated: {} (unix seconds)\n", unix_seconds()));
        out.push_str(&format!("# command = {}\n", self.command));
        for (key, value) in &self.config {
            out.push_str(&format!("# {key} = {value}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for (key, value) in &self.footer {
            out.push_str(&format!("# {key} = {}\n", value.csv()));
        }
        out
    }

    fn render_json(&self) -> String {
        let mut root = serde_json::Map::new();
        root.insert("version".into(), json!(VERSION));
        root.insert("generated".into(), json!(unix_seconds()));
        root.insert("command".into(), json!(self.command));
        let mut cfg = serde_json::Map::new();
        for (key, value) in &self.config {
            cfg.insert((*key).into(), json!(value));
        }
        root.insert("config".into(), Value::Object(cfg));
        root.insert("columns".into(), json!(self.columns));
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(Cell::json).collect()))
            .collect();
        root.insert("rows".into(), Value::Array(rows));
        for (key, value) in &self.footer {
            root.insert((*key).into(), value.json());
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(root))
            .expect("serializing an in-memory table cannot fail");
        text.push('\n');
        text
    }
}

/// Writes to the path when given, stdout otherwise. File writes go through
/// a sibling temp file and a rename, so a failed run leaves nothing behind.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) => write_atomic(p, content),
    }
}

pub fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    std::fs::write(&tmp, content)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        CliError::Failure(format!("cannot move output into {}: {e}", path.display()))
    })
}
