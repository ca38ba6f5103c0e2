//! The five subcommands: simulate, kernel, verify, figure, gap.

use pfaffwalk::continuum::{assemble_continuum_kernel, kernels};
use pfaffwalk::kernel::{assemble_matrix_kernel, solve_scalar_kernel, SolveOptions};
use pfaffwalk::lattice::{estimate_products, simulate_ensemble};
use pfaffwalk::stats::{
    gap_probability_continuum, least_squares_fit, rightmost_tail, GapMode, GapQuery,
};

use crate::config::RunConfig;
use crate::output::{fmt_f64, CsvWriter};
use crate::CliError;

/// Runs a trajectory ensemble and writes Monte Carlo estimates (with
/// standard errors) of occupation products at the configured point sets.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.trajectories == 0 {
        return Err(CliError::Config("trajectories must be positive".into()));
    }
    let eta0 = cfg.initial_configuration()?;
    let rates = cfg.rates()?;
    let window = cfg.window()?;
    let point_sets: Vec<Vec<i64>> = match &cfg.points {
        Some(p) if !p.is_empty() => p.clone(),
        _ => {
            // Default: single sites at the quartiles of the window.
            let q = (window.len() / 4) as i64;
            vec![
                vec![window.lo + q],
                vec![window.lo + 2 * q],
                vec![window.lo + 3 * q],
            ]
        }
    };
    for set in &point_sets {
        if set.is_empty() || set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config(format!(
                "point set {set:?} must be ascending and distinct"
            )));
        }
        if set.iter().any(|x| !window.contains(*x)) {
            return Err(CliError::Config(format!("point set {set:?} leaves the window")));
        }
    }

    let samples = simulate_ensemble(&eta0, &rates, cfg.t, cfg.seed, cfg.trajectories)
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    let arity = point_sets.iter().map(Vec::len).max().unwrap_or(1);
    let mut writer = CsvWriter::open(cfg, "simulate")?;
    let mut cols: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
    cols.extend(["estimate", "stderr", "n", "seed"].map(str::to_owned));
    writer.columns(&cols.iter().map(String::as_str).collect::<Vec<_>>())?;
    for set in &point_sets {
        let (mean, stderr) =
            estimate_products(&samples, set).map_err(|e| CliError::Numerical(e.to_string()))?;
        let mut row: Vec<String> = (0..arity)
            .map(|i| set.get(i).map(|x| x.to_string()).unwrap_or_default())
            .collect();
        row.push(fmt_f64(mean));
        row.push(fmt_f64(stderr));
        row.push(cfg.trajectories.to_string());
        row.push(cfg.seed.to_string());
        writer.row(&row)?;
    }
    Ok(())
}

/// Solves the scalar kernel at each configured time (`t_list` or the
/// single `t`) and writes the grids, together with the matrix-kernel
/// entries where they are evaluable.
pub fn cmd_kernel(cfg: &RunConfig) -> Result<(), CliError> {
    let eta0 = cfg.initial_configuration()?;
    let rates = cfg.rates()?;
    let times: Vec<f64> = match &cfg.t_list {
        Some(list) if !list.is_empty() => {
            if list.iter().any(|t| !(t >= &0.0)) {
                return Err(CliError::Config("t_list entries must be nonnegative".into()));
            }
            list.clone()
        }
        _ => vec![cfg.t],
    };
    let mut writer = CsvWriter::open(cfg, "kernel")?;
    writer.columns(&["t", "y", "z", "K", "K11", "K12", "K21", "K22"])?;
    for &t in &times {
        let kernel = solve_scalar_kernel(&eta0, &rates, t, &SolveOptions::default())
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let mk = assemble_matrix_kernel(kernel);
        let window = mk.evaluable();
        for y in window.sites() {
            for z in y..=window.hi {
                let k = mk
                    .scalar()
                    .value(y, z)
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
                let b = mk.block(y, z).map_err(|e| CliError::Numerical(e.to_string()))?;
                writer.row(&[
                    fmt_f64(t),
                    y.to_string(),
                    z.to_string(),
                    fmt_f64(k),
                    fmt_f64(b[0][0]),
                    fmt_f64(b[0][1]),
                    fmt_f64(b[1][0]),
                    fmt_f64(b[1][1]),
                ])?;
            }
        }
    }
    Ok(())
}

/// Absorbing and reflecting intensity profiles at the configured time and
/// theta, on a grid reaching 10 sqrt(t).
pub fn cmd_figure(cfg: &RunConfig) -> Result<(), CliError> {
    let (t, theta) = (cfg.t, cfg.theta);
    if !(t > 0.0) {
        return Err(CliError::Config(format!("figure requires t > 0, got {t}")));
    }
    let prefactor = 1.0 / (1.0 + theta);
    let steps = 200usize;
    let ymax = 10.0 * t.sqrt();
    let mut writer = CsvWriter::open(cfg, "figure")?;
    writer.columns(&["y", "rho_absorbing", "rho_reflecting", "rho_bulk"])?;
    for k in 0..=steps {
        let y = ymax * k as f64 / steps as f64;
        // Intensities are -dK/dz on the diagonal, scaled by 1/(1+theta);
        // the killed formula extends continuously to y = 0 where it
        // vanishes exactly.
        let absorbing = -prefactor * kernels::killed_dz(y, y, t);
        let reflecting = -prefactor * kernels::reflected_dz(y, y, t);
        let bulk = -prefactor * kernels::bulk_dz(y, y, t);
        writer.row(&[fmt_f64(y), fmt_f64(absorbing), fmt_f64(reflecting), fmt_f64(bulk)])?;
    }
    Ok(())
}

/// Gap-probability table: continuum Fredholm values over an interval or a
/// list of scaled lengths, with the fitted exponential decay rate.
pub fn cmd_gap(cfg: &RunConfig) -> Result<(), CliError> {
    let variant = cfg.continuum_variant()?;
    if !(cfg.t > 0.0) {
        return Err(CliError::Config("gap requires t > 0".into()));
    }
    let ck = assemble_continuum_kernel(variant, cfg.t, cfg.theta)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let mut rows: Vec<(f64, f64)> = Vec::new();
    match (&cfg.lengths, cfg.interval) {
        (Some(lengths), _) => {
            if lengths.is_empty() || lengths.iter().any(|l| !(l > &0.0)) {
                return Err(CliError::Config("lengths must be positive".into()));
            }
            // The killed kernel lives on the open half-line.
            let base = match variant {
                pfaffwalk::ContinuumVariant::Killed => 1e-6,
                _ => 0.0,
            };
            for &ell in lengths {
                let p = gap_probability_continuum(
                    &ck,
                    (base, base + ell * cfg.t.sqrt()),
                    cfg.nodes,
                )
                .map_err(|e| CliError::Numerical(e.to_string()))?;
                rows.push((ell, p));
            }
        }
        (None, Some((a, b))) => {
            let query = GapQuery { interval: (a, b), mode: GapMode::EmptyInterval };
            let p = gap_probability_continuum(&ck, query.interval, cfg.nodes)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            rows.push(((b - a) / cfg.t.sqrt(), p));
        }
        (None, None) => {
            // Right-tail mode: p(t, [L, inf)) at L = 5 sqrt(t).
            let l = 5.0 * cfg.t.sqrt();
            let query = GapQuery { interval: (l, f64::INFINITY), mode: GapMode::RightTail };
            let p = rightmost_tail(&ck, query.interval.0, cfg.nodes)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            rows.push((l / cfg.t.sqrt(), p));
        }
    }

    let fitted = if rows.len() >= 2 {
        let pts: Vec<(f64, f64)> = rows.iter().map(|&(l, p)| (l, p.ln())).collect();
        least_squares_fit(&pts).map(|(slope, _)| -slope).ok()
    } else {
        None
    };

    let mut writer = CsvWriter::open(cfg, "gap")?;
    writer.columns(&["length", "p", "log_p", "fitted_rate"])?;
    for (ell, p) in rows {
        writer.row(&[
            fmt_f64(ell),
            fmt_f64(p),
            fmt_f64(p.ln()),
            fitted.map(fmt_f64).unwrap_or_default(),
        ])?;
    }
    Ok(())
}
