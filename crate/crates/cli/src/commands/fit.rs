//! The fit command: finite-size scaling analysis of the nearest-neighbour
//! concurrence derivative.
//!
//! Input sweep files are a coverage manifest only — the command recomputes
//! every curve it fits. Sweep grids cannot resolve the 1e-5-scale minimum
//! shifts the fits depend on, so refitting from tabulated rows would pass
//! silently degraded data downstream.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use xychain_core::model::{ModelParams, LAMBDA_C};
use xychain_core::scaling::{self, DerivativeCurve};

use crate::commands::with_threads;
use crate::config::{self, Format, Settings};
use crate::input;
use crate::output::{self, json_number, Cell, Table};
use crate::{CliError, FitArgs};

const DEFAULT_SIZES: [u32; 7] = [41, 101, 251, 401, 801, 1601, 2701];

struct FitConfig {
    gamma: f64,
    sizes: Vec<u32>,
    lambda_0: f64,
    threads: Option<usize>,
    out: Option<PathBuf>,
}

pub fn run(args: FitArgs) -> Result<(), CliError> {
    let settings = Settings::resolve(
        args.common.config.as_deref(),
        &[
            ("gamma", args.gamma.as_deref()),
            ("sizes", args.sizes.as_deref()),
            ("lambda_0", args.lambda_0.as_deref()),
            ("format", args.common.format.as_deref()),
            ("threads", args.common.threads.as_deref()),
        ],
    )?;
    if settings.format_or(Format::Json)? != Format::Json {
        return Err(CliError::Invocation(
            "the fit report is json-only; csv is not supported here".into(),
        ));
    }
    let mut sizes = settings.finite_sizes_or(&DEFAULT_SIZES)?;
    sizes.sort_unstable();
    sizes.dedup();
    let cfg = FitConfig {
        gamma: settings.gamma_single(1.0)?,
        sizes,
        lambda_0: settings.f64_or("lambda_0", scaling::DEFAULT_REFERENCE_LAMBDA)?,
        threads: settings.threads()?,
        out: settings.output_path(args.common.out.as_deref()),
    };

    let coverage = input::read_coverage(&args.inputs)?;
    for &n in &cfg.sizes {
        if !coverage.covers(n, cfg.gamma) {
            return Err(CliError::Failure(format!(
                "MissingSeries: N={n} at gamma={} is not covered by the supplied sweep files",
                cfg.gamma
            )));
        }
    }

    let per_size: Result<Vec<(f64, f64, DerivativeCurve)>, CliError> =
        with_threads(cfg.threads, || {
            cfg.sizes
                .par_iter()
                .map(|&n| {
                    let params = ModelParams::finite(n, cfg.gamma, 1.0)
                        .map_err(|e| fail_n(n, cfg.gamma, e))?;
                    let m = scaling::lambda_min(&params).map_err(|e| fail_n(n, cfg.gamma, e))?;
                    let curve = scaling::derivative_curve(&params, m.x, cfg.lambda_0)
                        .map_err(|e| fail_n(n, cfg.gamma, e))?;
                    Ok((m.x, m.value, curve))
                })
                .collect()
        })?;
    let per_size = per_size?;

    let mut root = Map::new();
    root.insert("version".into(), json!(output::VERSION));
    root.insert("generated".into(), json!(output::unix_seconds()));
    root.insert("command".into(), json!("fit"));
    root.insert(
        "config".into(),
        Value::Object(echo_map(&echo(&cfg, &args.inputs))),
    );

    let lambda_m: Vec<Value> = cfg
        .sizes
        .iter()
        .zip(&per_size)
        .map(|(&n, (x, depth, _))| {
            let mut entry = Map::new();
            entry.insert("N".into(), json!(n));
            entry.insert("lambda_m".into(), json_number(*x));
            entry.insert("depth".into(), json_number(*depth));
            Value::Object(entry)
        })
        .collect();
    root.insert("lambda_m".into(), Value::Array(lambda_m));

    if cfg.sizes.len() < 2 {
        root.insert(
            "reason".into(),
            json!("a single size cannot constrain the scaling fits; collapse fields omitted"),
        );
        root.insert("collapse_scatter".into(), Value::Null);
        return emit_report(&cfg, root);
    }

    let gerr = |e: scaling::ScalingError| CliError::Failure(format!("gamma={}: {e}", cfg.gamma));
    let ns: Vec<f64> = cfg.sizes.iter().map(|&n| n as f64).collect();
    let shifts: Vec<f64> = per_size
        .iter()
        .map(|(x, _, _)| (x - LAMBDA_C).abs())
        .collect();
    let depths: Vec<f64> = per_size.iter().map(|(_, d, _)| *d).collect();
    let curves: Vec<DerivativeCurve> = per_size.iter().map(|(_, _, c)| c.clone()).collect();

    let theta = -scaling::fit_power(&ns, &shifts).map_err(gerr)?.exponent;
    let finite_slope = scaling::fit_log(&ns, &depths).map_err(gerr)?.slope;
    let infinite_slope = scaling::critical_log_slope(
        cfg.gamma,
        scaling::CRITICAL_FIT_T_LO,
        scaling::CRITICAL_FIT_T_HI,
        scaling::CRITICAL_FIT_POINTS,
    )
    .map_err(gerr)?
    .slope;
    let ratio = scaling::prefactor_ratio_nu(infinite_slope, finite_slope).map_err(gerr)?;
    let unit = scaling::collapse(&curves, 1.0).map_err(gerr)?;
    let nu_fit = scaling::fit_nu(&curves).map_err(gerr)?;

    root.insert("shift_exponent".into(), json_number(theta));
    root.insert("finite_slope".into(), json_number(finite_slope));
    root.insert("infinite_slope".into(), json_number(infinite_slope));
    root.insert("prefactor_ratio".into(), json_number(ratio));

    let mut nu = Map::new();
    nu.insert("nu".into(), json_number(nu_fit.nu));
    nu.insert("stderr".into(), json_number(nu_fit.stderr));
    nu.insert("residual".into(), json_number(nu_fit.residual));
    root.insert("nu_fit".into(), Value::Object(nu));

    let mut col = Map::new();
    col.insert("nu".into(), json_number(1.0));
    col.insert("residual".into(), json_number(unit.residual));
    col.insert("range".into(), json_number(unit.range));
    col.insert(
        "residual_over_range".into(),
        json_number(unit.residual / unit.range),
    );
    col.insert("offset_slope".into(), json_number(unit.offset_slope));
    col.insert(
        "background_slope".into(),
        json_number(unit.background_slope),
    );
    root.insert("collapse".into(), Value::Object(col));

    // One averaged master-curve sample per grid point: the empirical scaling
    // function the collapse aligned the curves onto.
    let q_samples: Vec<Value> = unit
        .grid
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let mean =
                unit.aligned.iter().map(|row| row[j]).sum::<f64>() / unit.aligned.len() as f64;
            let mut entry = Map::new();
            entry.insert("x".into(), json_number(x));
            entry.insert("q".into(), json_number(mean));
            Value::Object(entry)
        })
        .collect();
    root.insert("q_samples".into(), Value::Array(q_samples));

    match &cfg.out {
        Some(out) => {
            let scatter = scatter_path(out);
            write_scatter(&cfg, &args.inputs, &scatter, &curves)?;
            root.insert(
                "collapse_scatter".into(),
                json!(scatter.display().to_string()),
            );
        }
        None => {
            root.insert("collapse_scatter".into(), Value::Null);
        }
    }

    emit_report(&cfg, root)
}

fn fail_n(n: u32, gamma: f64, err: impl std::fmt::Display) -> CliError {
    CliError::Failure(format!("N={n} gamma={gamma}: {err}"))
}

fn echo(cfg: &FitConfig, inputs: &[PathBuf]) -> Vec<(&'static str, String)> {
    let input_list: Vec<String> = inputs.iter().map(|p| p.display().to_string()).collect();
    vec![
        ("gamma", output::fmt_sig(cfg.gamma)),
        (
            "sizes",
            cfg.sizes
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("lambda_0", output::fmt_sig(cfg.lambda_0)),
        ("format", "json".to_string()),
        ("threads", config::threads_echo(cfg.threads)),
        ("output_path", config::path_echo(cfg.out.as_deref())),
        ("inputs", input_list.join(",")),
    ]
}

fn echo_map(pairs: &[(&'static str, String)]) -> Map<String, Value> {
    let mut obj = Map::new();
    for (key, value) in pairs {
        obj.insert((*key).into(), json!(value));
    }
    obj
}

fn emit_report(cfg: &FitConfig, root: Map<String, Value>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(&Value::Object(root))
        .expect("serializing an in-memory report cannot fail");
    text.push('\n');
    output::emit(cfg.out.as_deref(), &text)
}

fn scatter_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "fit".to_string());
    out.with_file_name(format!("{stem}_collapse.csv"))
}

/// The raw scaled points behind the collapse, one row per (curve, grid
/// point): x = N (lambda - lambda_m), y = dC anchored at the reference.
fn write_scatter(
    cfg: &FitConfig,
    inputs: &[PathBuf],
    path: &Path,
    curves: &[DerivativeCurve],
) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for curve in curves {
        for (i, &l) in curve.lambda_grid.iter().enumerate() {
            rows.push(vec![
                Cell::Num(curve.n as f64 * (l - curve.lambda_min)),
                Cell::Num(curve.values[i] - curve.reference_value),
                Cell::Int(curve.n as u64),
            ]);
        }
    }
    let table = Table {
        command: "fit",
        config: echo(cfg, inputs),
        columns: vec!["x".to_string(), "y".to_string(), "N".to_string()],
        rows,
        footer: Vec::new(),
    };
    output::write_atomic(path, &table.render(Format::Csv))
}
