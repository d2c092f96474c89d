//! Experiment harness for the exponential energy-dissipation-preserving
//! collocation integrators: deterministic runs, convergence studies, and
//! property self-checks, all driven by a strict TOML configuration.

mod config;
mod error;
mod order;
mod output;
mod run;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{parse_config, DampingKind, ExperimentConfig};
use crate::error::CliError;
use crate::order::OrderArgs;

#[derive(Parser)]
#[command(
    name = "eepc",
    about = "High-order dissipation-rate-preserving integrators for damped Hamiltonian systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct Overrides {
    /// Seed for the constant-unequal damping case.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the config's `output.directory`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Number of Gauss-Legendre points for the stage integrals.
    #[arg(long = "quadrature-q")]
    quadrature_q: Option<usize>,
    /// Relative fixed-point tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one experiment and write solution/invariants/residuals CSVs.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Temporal convergence study over the orders 2, 4, 6, 8.
    Order {
        config: PathBuf,
        /// Comma-separated step sizes, e.g. --dts 0.036,0.018,0.009
        #[arg(long, value_delimiter = ',', required = true)]
        dts: Vec<f64>,
        /// Fine step for the order-8 reference solution.
        #[arg(long = "ref-dt")]
        ref_dt: Option<f64>,
        /// Use the built-in 2-D damped rotation with its closed-form
        /// reference instead of the configured system.
        #[arg(long = "linear-test")]
        linear_test: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the tableau/order-condition/symmetry/skewness self-checks.
    Verify,
}

fn apply_overrides(config: &mut ExperimentConfig, overrides: &Overrides) -> Result<(), CliError> {
    if let Some(seed) = overrides.seed {
        if config.damping.case == DampingKind::ConstantUnequal {
            config.damping.seed = Some(seed);
        } else {
            eprintln!("warning: --seed ignored for damping case other than constant-unequal");
        }
    }
    if let Some(dir) = &overrides.out_dir {
        config.output.directory = dir.clone();
    }
    if let Some(q) = overrides.quadrature_q {
        config.scheme.quadrature = q;
    }
    if let Some(tol) = overrides.tol {
        config.scheme.tol = tol;
    }
    config.validate()?;
    Ok(())
}

fn load(path: &PathBuf, overrides: &Overrides) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut config = parse_config(&text)?;
    apply_overrides(&mut config, overrides)?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config, overrides } => {
            load(config, overrides).and_then(|config| run::cmd_run(&config))
        }
        Command::Order {
            config,
            dts,
            ref_dt,
            linear_test,
            overrides,
        } => load(config, overrides).and_then(|config| {
            order::cmd_order(
                &config,
                &OrderArgs {
                    dts: dts.clone(),
                    ref_dt: *ref_dt,
                    linear_test: *linear_test,
                },
            )
        }),
        Command::Verify => {
            return if verify::cmd_verify() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
