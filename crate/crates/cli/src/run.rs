//! The `run` subcommand: integrate one configured experiment and write
//! solution, invariant, and residual tables.

use std::fs;
use std::path::Path;

use eepc::diagnostics::{invariant_series, residual_averaged, residual_known_eta, ResidualSeries};
use eepc::tableau::make_tableau_with_quadrature;
use eepc::trajectory::{integrate, Trajectory};

use crate::config::{build_system, ExperimentConfig};
use crate::error::CliError;
use crate::output::{fmt_float, write_csv, write_meta, IterationStats, MetaRecord};

pub fn cmd_run(config: &ExperimentConfig) -> Result<(), CliError> {
    let system = build_system(config)?;
    let sys = system.as_dyn();
    let tab = make_tableau_with_quadrature::<f64>(config.scheme.s, config.scheme.quadrature)?;
    let opts = config.solver_options();
    let x0 = config.initial_state();
    let steps = config.steps();
    let (n1, dx) = config.resolve_grid();

    let traj = integrate(sys, &tab, &opts, 0.0, config.time.dt, steps, &x0)?;

    let out_dir = &config.output.directory;
    fs::create_dir_all(out_dir)?;

    write_solution_csv(out_dir, &traj, config.output.stride)?;

    let invariants = sys.invariants();
    let series: Vec<Vec<f64>> = invariants
        .iter()
        .map(|inv| invariant_series(&traj, inv))
        .collect();
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain(invariants.iter().map(|inv| inv.name().to_string()))
        .collect();
    let rows: Vec<Vec<String>> = (0..traj.len())
        .map(|i| {
            std::iter::once(fmt_float(traj.time(i)))
                .chain(series.iter().map(|s| fmt_float(s[i])))
                .collect()
        })
        .collect();
    write_csv(out_dir.join("invariants.csv"), &header, &rows)?;

    let mut warnings = Vec::new();
    let mut residuals: Vec<ResidualSeries<f64>> = Vec::new();
    for inv in invariants {
        let computed = if inv.has_eta() {
            residual_known_eta(&traj, inv)
        } else {
            residual_averaged(&traj, inv, sys)
        };
        match computed {
            Ok(series) => residuals.push(series),
            Err(e) => {
                let note = format!("residual for {} skipped: {e}", inv.name());
                eprintln!("warning: {note}");
                warnings.push(note);
            }
        }
    }
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain(
            residuals
                .iter()
                .map(|r| format!("R_{}({})", r.invariant, r.mode)),
        )
        .collect();
    let rows: Vec<Vec<String>> = (0..steps)
        .map(|n| {
            std::iter::once(fmt_float(traj.time(n + 1)))
                .chain(residuals.iter().map(|r| fmt_float(r.values[n])))
                .collect()
        })
        .collect();
    write_csv(out_dir.join("residuals.csv"), &header, &rows)?;

    let meta = MetaRecord {
        command: "run".to_string(),
        n1,
        dx,
        steps,
        seed: config.damping.seed,
        iterations: IterationStats::from_counts(traj.iterations()),
        warnings,
        config: config.clone(),
    };
    write_meta(out_dir.join("meta.toml"), &meta)?;
    Ok(())
}

/// Grid snapshots every `stride` steps, always including the final state.
fn write_solution_csv(
    out_dir: &Path,
    traj: &Trajectory<f64>,
    stride: usize,
) -> Result<(), CliError> {
    let n = traj.state(0).len();
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=n).map(|j| format!("u{j}")))
        .collect();
    let mut indices: Vec<usize> = (0..traj.len()).step_by(stride).collect();
    if *indices.last().unwrap() != traj.len() - 1 {
        indices.push(traj.len() - 1);
    }
    let rows: Vec<Vec<String>> = indices
        .into_iter()
        .map(|i| {
            std::iter::once(fmt_float(traj.time(i)))
                .chain(traj.state(i).iter().map(|&v| fmt_float(v)))
                .collect()
        })
        .collect();
    write_csv(out_dir.join("solution.csv"), &header, &rows)?;
    Ok(())
}
