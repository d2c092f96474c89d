//! Fixed-step time integration and the recorded trajectory.

use std::error::Error;
use std::fmt;

use crate::scalar::{cast, Real};
use crate::stepper::{step_eepc, SolverOptions, StepContext, StepError};
use crate::system::DampedSystem;
use crate::tableau::CollocationTableau;

/// States of one fixed-step run; times are t0 + i·dt by construction, so
/// the uniform spacing cannot drift.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    t0: T,
    dt: T,
    states: Vec<Vec<T>>,
    iterations: Vec<usize>,
}

impl<T: Real> Trajectory<T> {
    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Number of recorded states (steps + 1).
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, i: usize) -> T {
        self.t0 + cast::<T>(i as f64) * self.dt
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    pub fn states(&self) -> &[Vec<T>] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[T] {
        &self.states[i]
    }

    pub fn last_state(&self) -> &[T] {
        self.states.last().expect("trajectory holds at least x0")
    }

    /// Per-step stage-solver iteration counts.
    pub fn iterations(&self) -> &[usize] {
        &self.iterations
    }
}

/// A step failure together with the index of the failing step.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateError<T> {
    pub step: usize,
    pub source: StepError<T>,
}

impl<T: fmt::Display> fmt::Display for IntegrateError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} failed: {}", self.step, self.source)
    }
}

impl<T: fmt::Display + fmt::Debug> Error for IntegrateError<T> {}

/// Integrate n_steps fixed steps of size dt from (t0, x0).
pub fn integrate<T: Real, S: DampedSystem<T> + ?Sized>(
    sys: &S,
    tab: &CollocationTableau<T>,
    opts: &SolverOptions<T>,
    t0: T,
    dt: T,
    n_steps: usize,
    x0: &[T],
) -> Result<Trajectory<T>, IntegrateError<T>> {
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut iterations = Vec::with_capacity(n_steps);
    states.push(x0.to_vec());
    let mut current = x0.to_vec();
    for step in 0..n_steps {
        let ctx = StepContext::new(t0 + cast::<T>(step as f64) * dt, dt);
        let result = step_eepc(sys, ctx, &current, tab, opts)
            .map_err(|source| IntegrateError { step, source })?;
        current = result.x1;
        states.push(current.clone());
        iterations.push(result.iterations);
    }
    Ok(Trajectory {
        t0,
        dt,
        states,
        iterations,
    })
}
