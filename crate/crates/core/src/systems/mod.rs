//! Concrete damped Hamiltonian systems: the semi-discrete Burgers and
//! KdV problems plus a 2-D linear benchmark with a closed-form flow.

use std::error::Error;
use std::fmt;

use crate::damping::DampingError;
use crate::fd::FdError;
use crate::scalar::{cast, Real};

mod burgers;
mod kdv;
mod linear;

pub use burgers::{make_burgers, Burgers};
pub use kdv::{apply_advection, make_kdv_h1, make_kdv_h2, KdvH1, KdvH2, KdvParams};
pub use linear::LinearDampedRotation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildError {
    Grid(FdError),
    Damping(DampingError),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::Grid(e) => write!(f, "{e}"),
            BuildError::Damping(e) => write!(f, "{e}"),
        }
    }
}

impl Error for BuildError {}

impl From<FdError> for BuildError {
    fn from(e: FdError) -> Self {
        BuildError::Grid(e)
    }
}

impl From<DampingError> for BuildError {
    fn from(e: DampingError) -> Self {
        BuildError::Damping(e)
    }
}

/// Periodic grid points x_i = −L + i·dx for i = 1..=n1.
pub fn grid_points<T: Real>(n1: usize, length: T, dx: T) -> Vec<T> {
    (1..=n1)
        .map(|i| -length + cast::<T>(i as f64) * dx)
        .collect()
}

/// Gaussian profile amplitude·e^{−((x−center)/width)²/2} / (width·√(2π))
/// sampled on the periodic grid; the defaults reproduce the standard
/// normal bump used by the Burgers runs.
pub fn gaussian_profile<T: Real>(
    n1: usize,
    length: T,
    dx: T,
    amplitude: T,
    center: T,
    width: T,
) -> Vec<T> {
    let norm = amplitude / (width * cast::<T>((2.0 * std::f64::consts::PI).sqrt()));
    grid_points(n1, length, dx)
        .into_iter()
        .map(|x| {
            let z = (x - center) / width;
            norm * (-z * z / cast::<T>(2.0)).exp()
        })
        .collect()
}
