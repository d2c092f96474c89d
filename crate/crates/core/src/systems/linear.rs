//! 2-D damped rotation benchmark with a closed-form flow.
//!
//! ẋ = ωJx − γx with J = [[0, 1], [−1, 0]] and H(x) = |x|²/2, so the
//! exact solution is x(t) = e^{−γt}(cos(ωt)·x₀ + sin(ωt)·Jx₀). Here γ is
//! the diagonal entry of D itself (no factor 2), and H is a quadratic
//! conformal invariant with rate η = 2γ.

use crate::scalar::{cast, Real};
use crate::system::{DampedSystem, Invariant};

pub struct LinearDampedRotation<T> {
    omega: T,
    gamma: T,
    invariants: Vec<Invariant<T>>,
}

impl<T: Real> LinearDampedRotation<T> {
    pub fn new(omega: T, gamma: T) -> Self {
        let two = cast::<T>(2.0);
        let invariants = vec![Invariant::conformal(
            "H",
            |x: &[T]| (x[0] * x[0] + x[1] * x[1]) / cast::<T>(2.0),
            move |_t| two * gamma,
            move |a, b| two * gamma * (b - a),
        )];
        Self {
            omega,
            gamma,
            invariants,
        }
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Exact flow at elapsed time t from the state x0.
    pub fn exact_state(&self, t: T, x0: &[T]) -> Vec<T> {
        let decay = (-self.gamma * t).exp();
        let (sin, cos) = (self.omega * t).sin_cos();
        vec![
            decay * (cos * x0[0] + sin * x0[1]),
            decay * (-sin * x0[0] + cos * x0[1]),
        ]
    }
}

impl<T: Real> DampedSystem<T> for LinearDampedRotation<T> {
    fn dim(&self) -> usize {
        2
    }

    fn skew_apply(&self, _t_mid: T, _x_mid: &[T], z: &[T], out: &mut [T]) {
        out[0] = self.omega * z[1];
        out[1] = -self.omega * z[0];
    }

    fn grad_h(&self, x: &[T], out: &mut [T]) {
        out.copy_from_slice(x);
    }

    fn energy(&self, x: &[T]) -> T {
        (x[0] * x[0] + x[1] * x[1]) / cast::<T>(2.0)
    }

    fn damping_diag(&self, _t: T, out: &mut [T]) {
        out.fill(self.gamma);
    }

    fn damping_antideriv(&self, t: T, out: &mut [T]) {
        out.fill(self.gamma * t);
    }

    fn invariants(&self) -> &[Invariant<T>] {
        &self.invariants
    }
}
