//! The `order` subcommand: temporal convergence study over s = 1..4.

use std::fs;

use eepc::diagnostics::{order_study, reference_solution};
use eepc::systems::LinearDampedRotation;
use eepc::tableau::{make_tableau_with_quadrature, CollocationTableau};

use crate::config::{build_system, ConfigError, ExperimentConfig};
use crate::error::CliError;
use crate::output::{fmt_float, write_csv, write_meta, MetaRecord};

pub struct OrderArgs {
    pub dts: Vec<f64>,
    pub ref_dt: Option<f64>,
    /// Replace the configured system by the 2-D damped rotation with a
    /// closed-form reference (ω = 7, γ = 0.1, x₀ = (1, 0)).
    pub linear_test: bool,
}

pub fn cmd_order(config: &ExperimentConfig, args: &OrderArgs) -> Result<(), CliError> {
    if args.dts.is_empty() {
        return Err(ConfigError {
            path: "--dts".to_string(),
            message: "at least one step size is required".to_string(),
        }
        .into());
    }
    let t_final = config.time.t_final;
    for &dt in &args.dts {
        if dt <= 0.0 {
            return Err(ConfigError {
                path: "--dts".to_string(),
                message: format!("step size {dt} must be positive"),
            }
            .into());
        }
        let ratio = t_final / dt;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(ConfigError {
                path: "--dts".to_string(),
                message: format!("t_final/dt = {ratio} is not an integer for dt = {dt}"),
            }
            .into());
        }
    }

    let opts = config.solver_options();
    let tableaux: Vec<CollocationTableau<f64>> = (1..=4)
        .map(|s| make_tableau_with_quadrature(s, config.scheme.quadrature))
        .collect::<Result<_, _>>()?;

    let mut warnings = Vec::new();
    let (study, n1, dx) = if args.linear_test {
        let sys = LinearDampedRotation::new(7.0, 0.1);
        let x0 = [1.0, 0.0];
        let reference = sys.exact_state(t_final, &x0);
        let study = order_study(
            &sys, &tableaux, &opts, 0.0, t_final, &x0, &args.dts, &reference, 1.0,
        )?;
        (study, 2, f64::NAN)
    } else {
        let ref_dt = args.ref_dt.ok_or_else(|| ConfigError {
            path: "--ref-dt".to_string(),
            message: "required unless --linear-test is set".to_string(),
        })?;
        let smallest = args.dts.iter().cloned().fold(f64::INFINITY, f64::min);
        if ref_dt > smallest / 4.0 {
            return Err(ConfigError {
                path: "--ref-dt".to_string(),
                message: format!(
                    "must be at most the smallest step size / 4 = {}",
                    smallest / 4.0
                ),
            }
            .into());
        }
        let system = build_system(config)?;
        let sys = system.as_dyn();
        let x0 = config.initial_state();
        let (n1, dx) = config.resolve_grid();
        let reference = reference_solution(sys, (0.0, t_final), &x0, ref_dt, &opts)?;
        let study = order_study(
            sys,
            &tableaux,
            &opts,
            0.0,
            t_final,
            &x0,
            &args.dts,
            reference.last_state(),
            dx,
        )?;
        (study, n1, dx)
    };

    let out_dir = &config.output.directory;
    fs::create_dir_all(out_dir)?;

    let header = ["s", "dt", "error", "seconds"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = study
        .points
        .iter()
        .map(|p| {
            vec![
                p.s.to_string(),
                fmt_float(p.dt),
                fmt_float(p.error),
                fmt_float(p.seconds),
            ]
        })
        .collect();
    write_csv(out_dir.join("order.csv"), &header, &rows)?;

    let header = ["s", "slope"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = study
        .slopes
        .iter()
        .filter_map(|fit| {
            fit.slope
                .map(|slope| vec![fit.s.to_string(), fmt_float(slope)])
        })
        .collect();
    if rows.is_empty() {
        let note = "no slopes could be fitted (fewer than two usable error values per s)";
        eprintln!("warning: {note}");
        warnings.push(note.to_string());
    }
    write_csv(out_dir.join("slopes.csv"), &header, &rows)?;

    let meta = MetaRecord {
        command: if args.linear_test {
            "order --linear-test".to_string()
        } else {
            "order".to_string()
        },
        n1,
        dx,
        steps: 0,
        seed: config.damping.seed,
        iterations: None,
        warnings,
        config: config.clone(),
    };
    write_meta(out_dir.join("meta.toml"), &meta)?;
    Ok(())
}
