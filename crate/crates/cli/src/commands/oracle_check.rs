//! The oracle-check command: dense diagonalization against the fermionic
//! solver on every small ring, with per-quantity worst deviations.
//!
//! Exit status is the verdict: 0 when every quantity agrees within 1e-8,
//! 1 otherwise, with the worst offender spelled out. The
//! `--perturb-convention` hook deliberately flips the heavy bond axis on
//! the dense side; a healthy check then fails loudly on the x/y
//! correlators, which is exactly the sabotage sensitivity this command
//! exists to demonstrate.

use rayon::prelude::*;

use xychain_core::entangle::{self, TwoSiteState};
use xychain_core::fermion;
use xychain_core::model::{Axis, ModelParams};
use xychain_core::oracle;

use crate::commands::with_threads;
use crate::config::{self, Format, Settings};
use crate::output::{self, Cell, Table};
use crate::{CliError, OracleCheckArgs};

const DEFAULT_SIZES: [u32; 5] = [3, 5, 7, 9, 11];
const DEFAULT_GAMMAS: [f64; 3] = [0.25, 0.5, 1.0];
const LAMBDAS: [f64; 6] = [0.0, 0.5, 0.9, 1.0, 1.1, 2.0];
const TOL: f64 = 1e-8;

struct Deviation {
    quantity: String,
    value: f64,
    n: u32,
    gamma: f64,
    lambda: f64,
}

pub fn run(args: OracleCheckArgs) -> Result<(), CliError> {
    let settings = Settings::resolve(
        args.common.config.as_deref(),
        &[
            ("sizes", args.sizes.as_deref()),
            ("gamma", args.gamma.as_deref()),
            ("format", args.common.format.as_deref()),
            ("threads", args.common.threads.as_deref()),
        ],
    )?;
    let sizes = settings.finite_sizes_or(&DEFAULT_SIZES)?;
    let gammas = settings
        .gamma_list()?
        .unwrap_or_else(|| DEFAULT_GAMMAS.to_vec());
    let format = settings.format_or(Format::Csv)?;
    let threads = settings.threads()?;
    let out = settings.output_path(args.common.out.as_deref());

    for &n in &sizes {
        if n > oracle::MAX_SITES {
            return Err(CliError::Failure(format!(
                "SizeTooLarge: N={n} exceeds the dense-diagonalization cap of {}",
                oracle::MAX_SITES
            )));
        }
    }

    let mut combos = Vec::new();
    for &n in &sizes {
        for &gamma in &gammas {
            for &lambda in &LAMBDAS {
                combos.push((n, gamma, lambda));
            }
        }
    }
    let deviations: Result<Vec<Vec<Deviation>>, CliError> = with_threads(threads, || {
        combos
            .par_iter()
            .map(|&(n, gamma, lambda)| check_point(n, gamma, lambda, args.perturb_convention))
            .collect()
    })?;
    let deviations: Vec<Deviation> = deviations?.into_iter().flatten().collect();

    // Aggregate to the worst case per quantity, in a fixed row order.
    let max_r = sizes.iter().map(|&n| 3.min((n - 1) / 2)).max().unwrap_or(0);
    let mut order = vec!["mz".to_string()];
    for r in 1..=max_r {
        order.push(format!("gxx_r{r}"));
        order.push(format!("gyy_r{r}"));
        order.push(format!("gzz_r{r}"));
        order.push(format!("rho_r{r}"));
        order.push(format!("C_{r}"));
    }
    let mut rows = Vec::new();
    let mut worst: Option<&Deviation> = None;
    for quantity in &order {
        let best = deviations
            .iter()
            .filter(|d| &d.quantity == quantity)
            .max_by(|a, b| a.value.total_cmp(&b.value));
        if let Some(d) = best {
            rows.push(vec![
                Cell::Text(d.quantity.clone()),
                Cell::Num(d.value),
                Cell::Int(d.n as u64),
                Cell::Num(d.gamma),
                Cell::Num(d.lambda),
                Cell::Text(if d.value < TOL { "PASS" } else { "FAIL" }.to_string()),
            ]);
            if worst.is_none_or(|w| d.value > w.value) {
                worst = Some(d);
            }
        }
    }

    let worst = worst.ok_or_else(|| CliError::Failure("empty check grid".into()))?;
    let passed = worst.value < TOL;
    let verdict = format!(
        "worst deviation {:.3e} at N={} gamma={} lambda={} on {}",
        worst.value, worst.n, worst.gamma, worst.lambda, worst.quantity
    );

    let table = Table {
        command: "oracle-check",
        config: vec![
            (
                "sizes",
                config::sizes_echo(
                    &sizes
                        .iter()
                        .map(|&n| xychain_core::model::Size::FiniteOdd(n))
                        .collect::<Vec<_>>(),
                ),
            ),
            ("gamma", config::gamma_echo(&gammas)),
            ("perturb_convention", args.perturb_convention.to_string()),
            ("format", format.name().to_string()),
            ("threads", config::threads_echo(threads)),
            ("output_path", config::path_echo(out.as_deref())),
        ],
        columns: [
            "quantity",
            "max_deviation",
            "N",
            "gamma",
            "lambda",
            "status",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        rows,
        footer: vec![
            (
                "result",
                Cell::Text(if passed { "PASS" } else { "FAIL" }.to_string()),
            ),
            ("worst", Cell::Text(verdict.clone())),
        ],
    };
    output::emit(out.as_deref(), &table.render(format))?;

    if passed {
        Ok(())
    } else {
        Err(CliError::Failure(format!("oracle check failed: {verdict}")))
    }
}

/// All deviations at one grid point; mirrors the library equivalence suite.
fn check_point(n: u32, gamma: f64, lambda: f64, perturb: bool) -> Result<Vec<Deviation>, CliError> {
    let at = |err: &dyn std::fmt::Display| {
        CliError::Failure(format!("N={n} gamma={gamma} lambda={lambda}: {err}"))
    };
    let params = ModelParams::finite(n, gamma, lambda).map_err(|e| at(&e))?;
    let gs = if perturb {
        let h = oracle::build_hamiltonian_with(&params, oracle::BondConvention::HeavyX)
            .map_err(|e| at(&e))?;
        oracle::ground_state(&h, 1usize << n).map_err(|e| at(&e))?
    } else {
        oracle::solve(&params).map_err(|e| at(&e))?
    };
    let r_max = 3.min((n - 1) / 2);
    let corr = fermion::correlators(&params, r_max).map_err(|e| at(&e))?;

    let mut out = Vec::new();
    let mut push = |quantity: String, value: f64| {
        out.push(Deviation {
            quantity,
            value,
            n,
            gamma,
            lambda,
        });
    };

    let mz = oracle::site_magnetization(&gs, n, 1).map_err(|e| at(&e))?;
    push("mz".to_string(), (mz - corr.mz).abs());

    for r in 1..=r_max {
        let j = 1 + r;
        let xx = oracle::correlator(&gs, n, Axis::X, 1, j).map_err(|e| at(&e))?;
        let yy = oracle::correlator(&gs, n, Axis::Y, 1, j).map_err(|e| at(&e))?;
        let zz = oracle::correlator(&gs, n, Axis::Z, 1, j).map_err(|e| at(&e))?;
        push(format!("gxx_r{r}"), (xx - corr.gxx(r)).abs());
        push(format!("gyy_r{r}"), (yy - corr.gyy(r)).abs());
        push(format!("gzz_r{r}"), (zz - corr.gzz(r)).abs());

        let rho_ed = oracle::reduced_density_matrix(&gs, n, 1, j).map_err(|e| at(&e))?;
        let state_ff = entangle::assemble_rdm(&corr, r).map_err(|e| at(&e))?;
        let rho_dev = rho_ed
            .iter()
            .zip(state_ff.matrix().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        push(format!("rho_r{r}"), rho_dev);

        let c_ff = entangle::concurrence(&state_ff).map_err(|e| at(&e))?;
        let c_dev = match TwoSiteState::new(rho_ed) {
            Ok(state_ed) => {
                let c_ed = entangle::concurrence(&state_ed).map_err(|e| at(&e))?;
                (c_ed - c_ff).abs()
            }
            // A dense-side matrix that does not even validate is maximally
            // deviant; surface that instead of aborting the table.
            Err(_) => f64::INFINITY,
        };
        push(format!("C_{r}"), c_dev);
    }
    Ok(out)
}
