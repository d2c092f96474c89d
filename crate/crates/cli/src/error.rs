use std::fmt;
use std::io;

use eepc::stepper::StepError;
use eepc::tableau::TableauError;
use eepc::trajectory::IntegrateError;

use crate::config::ConfigError;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Tableau(TableauError),
    /// A step failed; carries the failing step index.
    Integration(IntegrateError<f64>),
    Io(io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Tableau(e) => write!(f, "{e}"),
            CliError::Integration(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<TableauError> for CliError {
    fn from(e: TableauError) -> Self {
        CliError::Tableau(e)
    }
}

impl From<IntegrateError<f64>> for CliError {
    fn from(e: IntegrateError<f64>) -> Self {
        CliError::Integration(e)
    }
}

impl From<StepError<f64>> for CliError {
    fn from(e: StepError<f64>) -> Self {
        CliError::Integration(IntegrateError { step: 0, source: e })
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}
