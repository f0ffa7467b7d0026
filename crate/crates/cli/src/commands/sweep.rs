//! The sweep command: one row per (size, coupling) with magnetization,
//! correlators, concurrences, and the two derivative columns.

use rayon::prelude::*;

use xychain_core::entangle;
use xychain_core::fermion;
use xychain_core::model::{ModelParams, Size, LAMBDA_C};
use xychain_core::numeric::{geomspace, linspace};
use xychain_core::scaling;

use crate::commands::with_threads;
use crate::config::{self, Format, GridKind, Settings};
use crate::output::{self, Cell, Table};
use crate::{CliError, SweepArgs};

const DEFAULT_SIZES: [Size; 6] = [
    Size::FiniteOdd(11),
    Size::FiniteOdd(41),
    Size::FiniteOdd(101),
    Size::FiniteOdd(251),
    Size::FiniteOdd(401),
    Size::Infinite,
];

/// Geometric grids start this close to the critical coupling.
const GEOMETRIC_ANCHOR: f64 = 1e-4;

struct SweepConfig {
    gamma: f64,
    sizes: Vec<Size>,
    lambda_min: f64,
    lambda_max: f64,
    grid_points: u32,
    grid_kind: GridKind,
    r_max: u32,
    step: f64,
    format: Format,
    threads: Option<usize>,
    out: Option<std::path::PathBuf>,
}

pub fn run(args: SweepArgs) -> Result<(), CliError> {
    let settings = Settings::resolve(
        args.common.config.as_deref(),
        &[
            ("gamma", args.gamma.as_deref()),
            ("sizes", args.sizes.as_deref()),
            ("lambda_min", args.lambda_min.as_deref()),
            ("lambda_max", args.lambda_max.as_deref()),
            ("grid_points", args.grid_points.as_deref()),
            ("grid_kind", args.grid_kind.as_deref()),
            ("r_max", args.r_max.as_deref()),
            ("step", args.step.as_deref()),
            ("format", args.common.format.as_deref()),
            ("threads", args.common.threads.as_deref()),
        ],
    )?;
    let cfg = SweepConfig {
        gamma: settings.gamma_single(1.0)?,
        sizes: settings.sizes_or(&DEFAULT_SIZES)?,
        lambda_min: settings.f64_or("lambda_min", 0.0)?,
        lambda_max: settings.f64_or("lambda_max", 2.0)?,
        grid_points: settings.u32_or("grid_points", 81)?,
        grid_kind: settings.grid_kind()?,
        r_max: settings.u32_or("r_max", 3)?,
        step: settings.f64_or("step", 1e-4)?,
        format: settings.format_or(Format::Csv)?,
        threads: settings.threads()?,
        out: settings.output_path(args.common.out.as_deref()),
    };

    if cfg.grid_points == 0 {
        return Err(CliError::Invocation(
            "`grid_points` must be at least 1".into(),
        ));
    }
    if cfg.r_max == 0 {
        return Err(CliError::Invocation("`r_max` must be at least 1".into()));
    }
    if cfg.lambda_min > cfg.lambda_max {
        return Err(CliError::Invocation(
            "`lambda_min` must not exceed `lambda_max`".into(),
        ));
    }
    if cfg.grid_points > 1 && cfg.lambda_min == cfg.lambda_max {
        return Err(CliError::Invocation(
            "a multi-point grid needs `lambda_min` < `lambda_max`".into(),
        ));
    }
    if !(cfg.step > 0.0) {
        return Err(CliError::Invocation("`step` must be positive".into()));
    }

    let grid = coupling_grid(&cfg)?;
    let tasks: Vec<(usize, usize)> = (0..cfg.sizes.len())
        .flat_map(|i| (0..grid.len()).map(move |j| (i, j)))
        .collect();

    let computed: Result<Vec<((usize, usize), Vec<Cell>)>, CliError> =
        with_threads(cfg.threads, || {
            tasks
                .par_iter()
                .map(|&(i, j)| compute_row(&cfg, cfg.sizes[i], grid[j]).map(|c| ((i, j), c)))
                .collect()
        })?;
    let mut rows = computed?;
    rows.sort_by_key(|&((i, j), _)| (size_order(cfg.sizes[i]), j));
    let rows: Vec<Vec<Cell>> = rows.into_iter().map(|(_, cells)| cells).collect();

    let table = Table {
        command: "sweep",
        config: echo(&cfg),
        columns: columns(cfg.r_max),
        rows,
        footer: Vec::new(),
    };
    output::emit(cfg.out.as_deref(), &table.render(cfg.format))
}

fn size_order(size: Size) -> u64 {
    match size {
        Size::FiniteOdd(n) => n as u64,
        Size::Infinite => u64::MAX,
    }
}

fn echo(cfg: &SweepConfig) -> Vec<(&'static str, String)> {
    vec![
        ("gamma", output::fmt_sig(cfg.gamma)),
        ("sizes", config::sizes_echo(&cfg.sizes)),
        ("lambda_min", output::fmt_sig(cfg.lambda_min)),
        ("lambda_max", output::fmt_sig(cfg.lambda_max)),
        ("grid_points", cfg.grid_points.to_string()),
        ("grid_kind", cfg.grid_kind.name().to_string()),
        ("r_max", cfg.r_max.to_string()),
        ("step", output::fmt_sig(cfg.step)),
        ("format", cfg.format.name().to_string()),
        ("threads", config::threads_echo(cfg.threads)),
        ("output_path", config::path_echo(cfg.out.as_deref())),
    ]
}

fn columns(r_max: u32) -> Vec<String> {
    let mut cols = vec!["N".to_string(), "gamma".to_string(), "lambda".to_string()];
    cols.push("mz".to_string());
    for family in ["gxx", "gyy", "gzz"] {
        for r in 1..=r_max {
            cols.push(format!("{family}_r{r}"));
        }
    }
    for r in 1..=r_max {
        cols.push(format!("C_{r}"));
    }
    cols.push("dC_1".to_string());
    cols.push("d2C_2".to_string());
    cols
}

/// Linear grids span the window uniformly; geometric grids place points at
/// geometrically shrinking distances from the critical coupling on each
/// side of it that the window reaches, never sampling the critical point
/// itself.
fn coupling_grid(cfg: &SweepConfig) -> Result<Vec<f64>, CliError> {
    match cfg.grid_kind {
        GridKind::Linear => Ok(linspace(
            cfg.lambda_min,
            cfg.lambda_max,
            cfg.grid_points as usize,
        )),
        GridKind::GeometricAboutCritical => {
            let lo = cfg.lambda_min;
            let hi = cfg.lambda_max;
            let p = cfg.grid_points as usize;
            let has_left = lo < LAMBDA_C;
            let has_right = hi > LAMBDA_C;
            let (n_left, n_right) = match (has_left, has_right) {
                (true, true) => (p / 2, p - p / 2),
                (true, false) => (p, 0),
                (false, true) => (0, p),
                (false, false) => {
                    return Err(CliError::Invocation(
                        "geometric-about-critical needs a window extending away from the critical coupling".into(),
                    ))
                }
            };
            let mut grid = Vec::with_capacity(p);
            if n_left > 0 {
                let outer = LAMBDA_C - lo;
                let inner = if has_right {
                    GEOMETRIC_ANCHOR
                } else {
                    LAMBDA_C - hi
                };
                let inner = inner.max(GEOMETRIC_ANCHOR);
                if inner >= outer {
                    return Err(CliError::Invocation(
                        "geometric-about-critical window is narrower than its inner anchor".into(),
                    ));
                }
                for &offset in geomspace(inner, outer, n_left).iter().rev() {
                    grid.push(LAMBDA_C - offset);
                }
            }
            if n_right > 0 {
                let outer = hi - LAMBDA_C;
                let inner = if has_left {
                    GEOMETRIC_ANCHOR
                } else {
                    lo - LAMBDA_C
                };
                let inner = inner.max(GEOMETRIC_ANCHOR);
                if inner >= outer {
                    return Err(CliError::Invocation(
                        "geometric-about-critical window is narrower than its inner anchor".into(),
                    ));
                }
                for &offset in &geomspace(inner, outer, n_right) {
                    grid.push(LAMBDA_C + offset);
                }
            }
            Ok(grid)
        }
    }
}

fn at(size: Size, gamma: f64, lambda: f64, err: impl std::fmt::Display) -> CliError {
    CliError::Failure(format!("N={size} gamma={gamma} lambda={lambda}: {err}"))
}

fn compute_row(cfg: &SweepConfig, size: Size, lambda: f64) -> Result<Vec<Cell>, CliError> {
    let params =
        ModelParams::new(size, cfg.gamma, lambda).map_err(|e| at(size, cfg.gamma, lambda, e))?;
    let corr =
        fermion::correlators(&params, cfg.r_max).map_err(|e| at(size, cfg.gamma, lambda, e))?;

    let mut row = Vec::with_capacity(columns(cfg.r_max).len());
    row.push(match size {
        Size::FiniteOdd(n) => Cell::Int(n as u64),
        Size::Infinite => Cell::Text("inf".to_string()),
    });
    row.push(Cell::Num(cfg.gamma));
    row.push(Cell::Num(lambda));
    row.push(Cell::Num(corr.mz));
    for r in 1..=cfg.r_max {
        row.push(Cell::Num(corr.gxx(r)));
    }
    for r in 1..=cfg.r_max {
        row.push(Cell::Num(corr.gyy(r)));
    }
    for r in 1..=cfg.r_max {
        row.push(Cell::Num(corr.gzz(r)));
    }
    for r in 1..=cfg.r_max {
        let state = entangle::assemble_rdm(&corr, r).map_err(|e| at(size, cfg.gamma, lambda, e))?;
        let c = entangle::concurrence(&state).map_err(|e| at(size, cfg.gamma, lambda, e))?;
        row.push(Cell::Num(c));
    }
    row.push(Cell::Num(first_derivative(&params, cfg.step)?));
    row.push(Cell::Num(second_derivative(&params, cfg.step)?));
    Ok(row)
}

/// Derivative step for a row: fixed for finite rings (their observables are
/// analytic), shrunk near the critical coupling for the infinite chain so
/// the stencil never straddles the singularity.
fn row_step(params: &ModelParams, step: f64, shrink: f64) -> f64 {
    match params.size() {
        Size::FiniteOdd(_) => step,
        Size::Infinite => {
            let t = (params.lambda() - LAMBDA_C).abs();
            if t > 0.0 {
                step.min(t / shrink)
            } else {
                step
            }
        }
    }
}

fn c_closed(params: &ModelParams, r: u32, lambda: f64) -> Result<f64, CliError> {
    let point = params
        .with_lambda(lambda)
        .map_err(|e| at(params.size(), params.gamma(), lambda, e))?;
    let corr = fermion::correlators(&point, r)
        .map_err(|e| at(params.size(), params.gamma(), lambda, e))?;
    let state = entangle::assemble_rdm(&corr, r)
        .map_err(|e| at(params.size(), params.gamma(), lambda, e))?;
    Ok(entangle::concurrence_x_structure(&state))
}

/// dC(1)/dlambda. Central Richardson stencil away from the lower domain
/// edge; a one-sided second-order stencil when the coupling is too close to
/// zero for the centered points to stay non-negative.
fn first_derivative(params: &ModelParams, step: f64) -> Result<f64, CliError> {
    let lambda = params.lambda();
    let h = row_step(params, step, 20.0);
    if lambda >= h {
        scaling::concurrence_derivative(params, 1, lambda, h)
            .map_err(|e| at(params.size(), params.gamma(), lambda, e))
    } else {
        let f0 = c_closed(params, 1, lambda)?;
        let f1 = c_closed(params, 1, lambda + h)?;
        let f2 = c_closed(params, 1, lambda + 2.0 * h)?;
        Ok((-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h))
    }
}

/// d2C(2)/dlambda2 with the same edge handling (first-order forward second
/// difference at the edge, where the curve is essentially flat anyway).
fn second_derivative(params: &ModelParams, step: f64) -> Result<f64, CliError> {
    let lambda = params.lambda();
    let h = row_step(params, step, 10.0);
    if lambda >= h {
        scaling::concurrence_second_derivative(params, 2, lambda, h)
            .map_err(|e| at(params.size(), params.gamma(), lambda, e))
    } else {
        let f0 = c_closed(params, 2, lambda)?;
        let f1 = c_closed(params, 2, lambda + h)?;
        let f2 = c_closed(params, 2, lambda + 2.0 * h)?;
        Ok((f2 - 2.0 * f1 + f0) / (h * h))
    }
}
