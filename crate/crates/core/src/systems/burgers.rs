//! Semi-discrete damped Burgers system u̇ = −½ D₁∇H(u) − 2γu with
//! H(u) = ⅓ Σ (u^j)³.
//!
//! Because 1ᵀD₁ = 0, the mass M(u) = Σ u^k is a conformal invariant with
//! rate equal to the (common) diagonal entry of D whenever the damping is
//! equal across components.

use crate::damping::{make_damping, Damping, DampingCase};
use crate::fd::{build_fd_operators, FdOperators};
use crate::scalar::{cast, Real};
use crate::system::{DampedSystem, Invariant};

use super::BuildError;

pub struct Burgers<T> {
    n1: usize,
    ops: FdOperators<T>,
    damping: Damping<T>,
    invariants: Vec<Invariant<T>>,
}

/// Build the Burgers system on a periodic grid of n1 points.
pub fn make_burgers<T: Real>(
    n1: usize,
    dx: T,
    case: &DampingCase<T>,
) -> Result<Burgers<T>, BuildError> {
    let ops = build_fd_operators(n1, dx)?;
    let damping = make_damping(case, n1)?;

    let mut invariants = vec![Invariant::monitored("H", energy::<T>)];
    // mass: exact rate known only when the diagonal is equal
    if damping.is_equal_diagonal() {
        let d_rate = damping.clone();
        let d_int = damping.clone();
        invariants.push(Invariant::conformal(
            "M",
            mass::<T>,
            move |t| d_rate.common_rate(t).expect("equal diagonal"),
            move |a, b| d_int.common_rate_integral(a, b).expect("equal diagonal"),
        ));
    } else {
        invariants.push(Invariant::monitored("M", mass::<T>));
    }

    Ok(Burgers {
        n1,
        ops,
        damping,
        invariants,
    })
}

fn energy<T: Real>(x: &[T]) -> T {
    let third = T::one() / cast::<T>(3.0);
    x.iter().map(|&u| u * u * u).sum::<T>() * third
}

fn mass<T: Real>(x: &[T]) -> T {
    x.iter().copied().sum()
}

impl<T: Real> Burgers<T> {
    pub fn operators(&self) -> &FdOperators<T> {
        &self.ops
    }
}

impl<T: Real> DampedSystem<T> for Burgers<T> {
    fn dim(&self) -> usize {
        self.n1
    }

    fn skew_apply(&self, _t_mid: T, _x_mid: &[T], z: &[T], out: &mut [T]) {
        self.ops.d1.apply(z, out);
        let neg_half = -T::one() / cast::<T>(2.0);
        for o in out.iter_mut() {
            *o *= neg_half;
        }
    }

    fn grad_h(&self, x: &[T], out: &mut [T]) {
        for (o, &u) in out.iter_mut().zip(x) {
            *o = u * u;
        }
    }

    fn energy(&self, x: &[T]) -> T {
        energy(x)
    }

    fn damping_diag(&self, t: T, out: &mut [T]) {
        self.damping.diag(t, out);
    }

    fn damping_antideriv(&self, t: T, out: &mut [T]) {
        self.damping.antideriv(t, out);
    }

    fn invariants(&self) -> &[Invariant<T>] {
        &self.invariants
    }
}
