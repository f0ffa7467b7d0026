//! Config resolution: defaults, then the config file, then flags.
//!
//! All commands share one key vocabulary. A config file may set any known
//! key; each command reads the keys relevant to it and ignores the rest.
//! Unknown keys are rejected outright so typos cannot silently fall back to
//! defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use xychain_core::model::Size;

use crate::CliError;

/// The full key vocabulary accepted in config files.
pub const KNOWN_KEYS: [&str; 13] = [
    "gamma",
    "sizes",
    "lambda_min",
    "lambda_max",
    "grid_points",
    "grid_kind",
    "r_max",
    "step",
    "threshold",
    "lambda_0",
    "output_path",
    "format",
    "threads",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Linear,
    GeometricAboutCritical,
}

impl GridKind {
    pub fn name(self) -> &'static str {
        match self {
            GridKind::Linear => "linear",
            GridKind::GeometricAboutCritical => "geometric-about-critical",
        }
    }
}

/// Key/value settings after merging the config file with flag overrides.
pub struct Settings {
    values: BTreeMap<&'static str, String>,
}

fn bad(msg: String) -> CliError {
    CliError::Invocation(msg)
}

impl Settings {
    /// Reads the optional config file and applies flag overrides on top.
    /// `overrides` pairs a key with the flag value when the flag was given.
    pub fn resolve(
        file: Option<&Path>,
        overrides: &[(&'static str, Option<&str>)],
    ) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| bad(format!("cannot read config file {}: {e}", path.display())))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    bad(format!(
                        "{}:{}: expected `key = value`, got `{line}`",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                let key = key.trim();
                let canonical = KNOWN_KEYS.iter().find(|&&k| k == key).ok_or_else(|| {
                    bad(format!(
                        "{}:{}: unknown config key `{key}`",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                values.insert(*canonical, value.trim().to_string());
            }
        }
        for &(key, value) in overrides {
            if let Some(v) = value {
                values.insert(key, v.trim().to_string());
            }
        }
        Ok(Settings { values })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s
                .parse::<f64>()
                .map_err(|_| bad(format!("invalid value for `{key}`: `{s}`"))),
        }
    }

    pub fn u32_or(&self, key: &str, default: u32) -> Result<u32, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s
                .parse::<u32>()
                .map_err(|_| bad(format!("invalid value for `{key}`: `{s}`"))),
        }
    }

    /// Comma-separated anisotropy list; `None` when the key is unset.
    pub fn gamma_list(&self) -> Result<Option<Vec<f64>>, CliError> {
        match self.raw("gamma") {
            None => Ok(None),
            Some(s) => {
                let mut out = Vec::new();
                for part in s.split(',') {
                    let part = part.trim();
                    out.push(
                        part.parse::<f64>()
                            .map_err(|_| bad(format!("invalid value for `gamma`: `{part}`")))?,
                    );
                }
                if out.is_empty() {
                    return Err(bad("`gamma` must list at least one value".into()));
                }
                Ok(Some(out))
            }
        }
    }

    /// Exactly one anisotropy, for the commands that sweep a single gamma.
    pub fn gamma_single(&self, default: f64) -> Result<f64, CliError> {
        match self.gamma_list()? {
            None => Ok(default),
            Some(list) if list.len() == 1 => Ok(list[0]),
            Some(list) => Err(bad(format!(
                "this command takes a single `gamma`, got {} values",
                list.len()
            ))),
        }
    }

    /// Comma-separated size list; each entry an integer or `inf`.
    pub fn sizes_or(&self, default: &[Size]) -> Result<Vec<Size>, CliError> {
        match self.raw("sizes") {
            None => Ok(default.to_vec()),
            Some(s) => {
                let mut out = Vec::new();
                for part in s.split(',') {
                    let part = part.trim();
                    if part == "inf" {
                        out.push(Size::Infinite);
                    } else {
                        let n = part
                            .parse::<u32>()
                            .map_err(|_| bad(format!("invalid value for `sizes`: `{part}`")))?;
                        out.push(Size::FiniteOdd(n));
                    }
                }
                if out.is_empty() {
                    return Err(bad("`sizes` must list at least one value".into()));
                }
                Ok(out)
            }
        }
    }

    /// Size list restricted to finite rings.
    pub fn finite_sizes_or(&self, default: &[u32]) -> Result<Vec<u32>, CliError> {
        let sizes = self.sizes_or(
            &default
                .iter()
                .map(|&n| Size::FiniteOdd(n))
                .collect::<Vec<_>>(),
        )?;
        sizes
            .into_iter()
            .map(|s| match s {
                Size::FiniteOdd(n) => Ok(n),
                Size::Infinite => Err(bad("this command accepts finite sizes only".into())),
            })
            .collect()
    }

    pub fn format_or(&self, default: Format) -> Result<Format, CliError> {
        match self.raw("format") {
            None => Ok(default),
            Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some(other) => Err(bad(format!(
                "invalid value for `format`: `{other}` (expected csv or json)"
            ))),
        }
    }

    pub fn grid_kind(&self) -> Result<GridKind, CliError> {
        match self.raw("grid_kind") {
            None => Ok(GridKind::Linear),
            Some("linear") => Ok(GridKind::Linear),
            Some("geometric-about-critical") => Ok(GridKind::GeometricAboutCritical),
            Some(other) => Err(bad(format!(
                "invalid value for `grid_kind`: `{other}` (expected linear or geometric-about-critical)"
            ))),
        }
    }

    /// Worker count; `None` means use the default thread pool.
    pub fn threads(&self) -> Result<Option<usize>, CliError> {
        match self.raw("threads") {
            None => Ok(None),
            Some(s) => {
                let k = s
                    .parse::<usize>()
                    .map_err(|_| bad(format!("invalid value for `threads`: `{s}`")))?;
                if k == 0 {
                    return Err(bad("`threads` must be at least 1".into()));
                }
                Ok(Some(k))
            }
        }
    }

    /// Output path: the `--out` flag wins over the `output_path` key.
    pub fn output_path(&self, flag: Option<&Path>) -> Option<PathBuf> {
        flag.map(Path::to_path_buf)
            .or_else(|| self.raw("output_path").map(PathBuf::from))
    }
}

/// Canonical echo string for a size list.
pub fn sizes_echo(sizes: &[Size]) -> String {
    let parts: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
    parts.join(",")
}

/// Canonical echo string for an anisotropy list.
pub fn gamma_echo(gammas: &[f64]) -> String {
    let parts: Vec<String> = gammas.iter().map(|&g| crate::output::fmt_sig(g)).collect();
    parts.join(",")
}

/// Canonical echo string for a worker count.
pub fn threads_echo(threads: Option<usize>) -> String {
    match threads {
        None => "auto".to_string(),
        Some(k) => k.to_string(),
    }
}

/// Canonical echo string for the output destination.
pub fn path_echo(path: Option<&Path>) -> String {
    match path {
        None => "-".to_string(),
        Some(p) => p.display().to_string(),
    }
}
