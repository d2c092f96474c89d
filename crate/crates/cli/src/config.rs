//! Experiment configuration: strict TOML schema, validation with field
//! paths, and construction of the configured system.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use eepc::damping::DampingCase;
use eepc::stepper::{SolveStrategy, SolverOptions};
use eepc::system::DampedSystem;
use eepc::systems::{
    gaussian_profile, make_burgers, make_kdv_h1, make_kdv_h2, Burgers, KdvH1, KdvH2, KdvParams,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemKind,
    pub grid: GridConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsConfig>,
    pub damping: DampingConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialConfig>,
    pub time: TimeConfig,
    pub scheme: SchemeConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemKind {
    #[serde(rename = "burgers")]
    Burgers,
    #[serde(rename = "kdv-h1")]
    KdvH1,
    #[serde(rename = "kdv-h2")]
    KdvH2,
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemKind::Burgers => write!(f, "burgers"),
            SystemKind::KdvH1 => write!(f, "kdv-h1"),
            SystemKind::KdvH2 => write!(f, "kdv-h2"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Half-width L of the periodic interval [−L, L].
    pub length: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n1: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub alpha: f64,
    pub rho: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DampingConfig {
    pub case: DampingKind,
    /// Base γ; for the time-dependent case this scales e^{−t}.
    pub gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DampingKind {
    #[serde(rename = "constant-equal")]
    ConstantEqual,
    #[serde(rename = "constant-unequal")]
    ConstantUnequal,
    #[serde(rename = "time-dependent-equal")]
    TimeDependentEqual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub center: f64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub width: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            center: 0.0,
            width: 1.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_final: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    /// Stage count; the method order is 2s.
    pub s: usize,
    #[serde(
        default = "default_quadrature",
        skip_serializing_if = "is_default_quadrature"
    )]
    pub quadrature: usize,
    #[serde(default = "default_tol", skip_serializing_if = "is_default_tol")]
    pub tol: f64,
    #[serde(
        default = "default_max_iter",
        skip_serializing_if = "is_default_max_iter"
    )]
    pub max_iter: usize,
    #[serde(default, skip_serializing_if = "is_default_solver")]
    pub solver: SolverKind,
}

fn default_quadrature() -> usize {
    8
}

fn is_default_quadrature(v: &usize) -> bool {
    *v == 8
}

fn default_tol() -> f64 {
    1e-13
}

fn is_default_tol(v: &f64) -> bool {
    *v == 1e-13
}

fn default_max_iter() -> usize {
    100
}

fn is_default_max_iter(v: &usize) -> bool {
    *v == 100
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SolverKind {
    #[default]
    #[serde(rename = "fixed-point")]
    FixedPoint,
    #[serde(rename = "newton")]
    Newton,
}

fn is_default_solver(v: &SolverKind) -> bool {
    *v == SolverKind::FixedPoint
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    #[serde(default = "default_stride", skip_serializing_if = "is_default_stride")]
    pub stride: usize,
}

fn default_stride() -> usize {
    50
}

fn is_default_stride(v: &usize) -> bool {
    *v == 50
}

/// Configuration failure, carrying the offending field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: &str, message: impl Into<String>) -> Self {
        Self {
            path: path.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at `{}`: {}", self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError {
        path: e
            .span()
            .map(|s| format!("byte range {}..{}", s.start, s.end))
            .unwrap_or_else(|| "document".to_string()),
        message: e.message().to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        match (self.grid.dx, self.grid.n1) {
            (None, None) => {
                return Err(ConfigError::new("grid", "one of `dx` or `n1` is required"))
            }
            (Some(_), Some(_)) => {
                return Err(ConfigError::new("grid", "give only one of `dx` and `n1`"))
            }
            (Some(dx), None) if dx <= 0.0 => {
                return Err(ConfigError::new("grid.dx", "must be positive"))
            }
            (None, Some(n1)) if n1 < 3 => {
                return Err(ConfigError::new("grid.n1", "needs at least 3 points"))
            }
            _ => {}
        }
        if self.grid.length <= 0.0 {
            return Err(ConfigError::new("grid.length", "must be positive"));
        }
        match self.system {
            SystemKind::Burgers => {
                if self.params.is_some() {
                    return Err(ConfigError::new(
                        "params",
                        "not used by system `burgers`; remove the section",
                    ));
                }
            }
            SystemKind::KdvH1 | SystemKind::KdvH2 => {
                if self.params.is_none() {
                    return Err(ConfigError::new(
                        "params",
                        format!("required for system `{}`", self.system),
                    ));
                }
            }
        }
        match self.damping.case {
            DampingKind::ConstantUnequal => {}
            _ => {
                if self.damping.spread.is_some() {
                    return Err(ConfigError::new(
                        "damping.spread",
                        "only used by case `constant-unequal`",
                    ));
                }
                if self.damping.seed.is_some() {
                    return Err(ConfigError::new(
                        "damping.seed",
                        "only used by case `constant-unequal`",
                    ));
                }
            }
        }
        if self.time.dt <= 0.0 {
            return Err(ConfigError::new("time.dt", "must be positive"));
        }
        if self.time.t_final < 0.0 {
            return Err(ConfigError::new("time.t_final", "must be non-negative"));
        }
        let ratio = self.time.t_final / self.time.dt;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(ConfigError::new(
                "time",
                format!("t_final/dt = {ratio} is not an integer (tolerance 1e-9)"),
            ));
        }
        if !(1..=4).contains(&self.scheme.s) {
            return Err(ConfigError::new(
                "scheme.s",
                "supported stage counts are 1..4",
            ));
        }
        if self.scheme.quadrature < 1 {
            return Err(ConfigError::new(
                "scheme.quadrature",
                "needs at least one node",
            ));
        }
        if self.scheme.tol <= 0.0 {
            return Err(ConfigError::new("scheme.tol", "must be positive"));
        }
        if self.scheme.max_iter < 1 {
            return Err(ConfigError::new("scheme.max_iter", "must be at least 1"));
        }
        if self.output.stride < 1 {
            return Err(ConfigError::new("output.stride", "must be at least 1"));
        }
        if let Some(initial) = &self.initial {
            if initial.width <= 0.0 {
                return Err(ConfigError::new("initial.width", "must be positive"));
            }
        }
        Ok(())
    }

    /// Grid resolution: n1 and the spacing actually used. A given dx is
    /// kept as-is with n1 = round(2L/dx); a given n1 implies dx = 2L/n1.
    pub fn resolve_grid(&self) -> (usize, f64) {
        match (self.grid.dx, self.grid.n1) {
            (Some(dx), None) => (((2.0 * self.grid.length) / dx).round() as usize, dx),
            (None, Some(n1)) => (n1, 2.0 * self.grid.length / n1 as f64),
            _ => unreachable!("validated"),
        }
    }

    pub fn steps(&self) -> usize {
        (self.time.t_final / self.time.dt).round() as usize
    }

    pub fn damping_case(&self) -> DampingCase<f64> {
        match self.damping.case {
            DampingKind::ConstantEqual => DampingCase::ConstantEqual {
                gamma: self.damping.gamma,
            },
            DampingKind::ConstantUnequal => DampingCase::ConstantUnequal {
                gamma: self.damping.gamma,
                spread: self.damping.spread.unwrap_or(0.1),
                seed: self.damping.seed,
            },
            DampingKind::TimeDependentEqual => DampingCase::TimeDependentEqual {
                scale: self.damping.gamma,
            },
        }
    }

    pub fn solver_options(&self) -> SolverOptions<f64> {
        SolverOptions {
            tol: self.scheme.tol,
            max_iter: self.scheme.max_iter,
            strategy: match self.scheme.solver {
                SolverKind::FixedPoint => SolveStrategy::FixedPoint,
                SolverKind::Newton => SolveStrategy::Newton,
            },
        }
    }

    /// Initial profile sampled on the resolved grid.
    pub fn initial_state(&self) -> Vec<f64> {
        let (n1, dx) = self.resolve_grid();
        let init = self.initial.unwrap_or_default();
        gaussian_profile(
            n1,
            self.grid.length,
            dx,
            init.amplitude,
            init.center,
            init.width,
        )
    }
}

/// The configured system behind the common interface.
pub enum BuiltSystem {
    Burgers(Burgers<f64>),
    KdvH1(KdvH1<f64>),
    KdvH2(KdvH2<f64>),
}

impl BuiltSystem {
    pub fn as_dyn(&self) -> &dyn DampedSystem<f64> {
        match self {
            BuiltSystem::Burgers(s) => s,
            BuiltSystem::KdvH1(s) => s,
            BuiltSystem::KdvH2(s) => s,
        }
    }
}

pub fn build_system(config: &ExperimentConfig) -> Result<BuiltSystem, ConfigError> {
    let (n1, dx) = config.resolve_grid();
    let case = config.damping_case();
    let to_config_error = |e: eepc::systems::BuildError| match e {
        eepc::systems::BuildError::Damping(_) => ConfigError::new(
            "damping.seed",
            "required for case `constant-unequal` (or pass --seed)",
        ),
        eepc::systems::BuildError::Grid(g) => ConfigError::new("grid", g.to_string()),
    };
    let params = config.params.map(|p| KdvParams {
        alpha: p.alpha,
        rho: p.rho,
        nu: p.nu,
    });
    let system = match config.system {
        SystemKind::Burgers => {
            BuiltSystem::Burgers(make_burgers(n1, dx, &case).map_err(to_config_error)?)
        }
        SystemKind::KdvH1 => BuiltSystem::KdvH1(
            make_kdv_h1(n1, dx, params.expect("validated"), &case).map_err(to_config_error)?,
        ),
        SystemKind::KdvH2 => BuiltSystem::KdvH2(
            make_kdv_h2(n1, dx, params.expect("validated"), &case).map_err(to_config_error)?,
        ),
    };
    Ok(system)
}
