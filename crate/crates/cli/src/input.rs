//! Reading existing sweep outputs back in.
//!
//! The fit command treats its input files purely as a coverage manifest: it
//! verifies that every requested (N, gamma) series was actually swept, then
//! recomputes the curves it needs at full precision. Sweep grids are far too
//! coarse to resolve the minima the fits depend on, so refitting from file
//! values would silently degrade the results.

use std::path::Path;

use serde_json::Value;

use crate::CliError;

/// The (N column, gamma) pairs found across all input files. N stays a
/// string so `inf` rows carry through unharmed.
pub struct Coverage {
    pairs: Vec<(String, f64)>,
}

impl Coverage {
    pub fn covers(&self, n: u32, gamma: f64) -> bool {
        self.pairs
            .iter()
            .any(|(size, g)| size.parse::<u32>() == Ok(n) && (g - gamma).abs() < 1e-9)
    }
}

fn fail(msg: String) -> CliError {
    CliError::Failure(msg)
}

pub fn read_coverage(paths: &[impl AsRef<Path>]) -> Result<Coverage, CliError> {
    let mut pairs: Vec<(String, f64)> = Vec::new();
    for path in paths {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| fail(format!("cannot read sweep file {}: {e}", path.display())))?;
        let found = if text.trim_start().starts_with('{') {
            read_json(path, &text)?
        } else {
            read_csv(path, &text)?
        };
        for pair in found {
            if !pairs.contains(&pair) {
                pairs.push(pair);
            }
        }
    }
    Ok(Coverage { pairs })
}

fn read_csv(path: &Path, text: &str) -> Result<Vec<(String, f64)>, CliError> {
    let mut header: Option<Vec<String>> = None;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match &header {
            None => header = Some(line.split(',').map(str::to_string).collect()),
            Some(cols) => {
                let n_idx = column(path, cols, "N")?;
                let g_idx = column(path, cols, "gamma")?;
                let cells: Vec<&str> = line.split(',').collect();
                if cells.len() <= n_idx.max(g_idx) {
                    return Err(fail(format!("{}: short data row `{line}`", path.display())));
                }
                let gamma = cells[g_idx].parse::<f64>().map_err(|_| {
                    fail(format!(
                        "{}: unreadable gamma `{}`",
                        path.display(),
                        cells[g_idx]
                    ))
                })?;
                out.push((cells[n_idx].to_string(), gamma));
            }
        }
    }
    if header.is_none() {
        return Err(fail(format!("{}: no column header found", path.display())));
    }
    Ok(out)
}

fn column(path: &Path, cols: &[String], name: &str) -> Result<usize, CliError> {
    cols.iter()
        .position(|c| c == name)
        .ok_or_else(|| fail(format!("{}: missing column `{name}`", path.display())))
}

fn read_json(path: &Path, text: &str) -> Result<Vec<(String, f64)>, CliError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| fail(format!("{}: invalid json: {e}", path.display())))?;
    let columns: Vec<String> = root["columns"]
        .as_array()
        .ok_or_else(|| fail(format!("{}: missing `columns` array", path.display())))?
        .iter()
        .map(|c| c.as_str().unwrap_or_default().to_string())
        .collect();
    let n_idx = column(path, &columns, "N")?;
    let g_idx = column(path, &columns, "gamma")?;
    let rows = root["rows"]
        .as_array()
        .ok_or_else(|| fail(format!("{}: missing `rows` array", path.display())))?;
    let mut out = Vec::new();
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| fail(format!("{}: malformed row", path.display())))?;
        if row.len() <= n_idx.max(g_idx) {
            return Err(fail(format!("{}: short data row", path.display())));
        }
        let size = match &row[n_idx] {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            other => return Err(fail(format!("{}: bad N cell {other}", path.display()))),
        };
        let gamma = row[g_idx]
            .as_f64()
            .ok_or_else(|| fail(format!("{}: bad gamma cell", path.display())))?;
        out.push((size, gamma));
    }
    Ok(out)
}
