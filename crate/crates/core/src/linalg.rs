//! Small dense-vector helpers shared by the steppers and diagnostics.

use std::error::Error;
use std::fmt;

use crate::scalar::Real;

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm_inf<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

pub fn norm_l2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn max_abs_diff<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}

/// Discrete L² distance `sqrt(weight · Σ (a_i − b_i)²)`.
///
/// `weight` is the cell size Δx for semi-discrete PDE states and 1 for
/// plain ODE states.
pub fn weighted_l2_distance<T: Real>(a: &[T], b: &[T], weight: T) -> T {
    let sum: T = a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum();
    (weight * sum).sqrt()
}

/// dst = e^y ∘ x, elementwise.
pub fn exp_scale<T: Real>(y: &[T], x: &[T], dst: &mut [T]) {
    for ((d, &yi), &xi) in dst.iter_mut().zip(y).zip(x) {
        *d = yi.exp() * xi;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularMatrix;

impl fmt::Display for SingularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "matrix is singular to working precision")
    }
}

impl Error for SingularMatrix {}

/// Solve the dense system `a · x = b` by LU with partial pivoting.
///
/// `a` is row-major n×n and is overwritten; `b` holds the solution on
/// return.
pub fn solve_dense<T: Real>(a: &mut [T], b: &mut [T]) -> Result<(), SingularMatrix> {
    let n = b.len();
    assert_eq!(a.len(), n * n, "matrix/vector size mismatch");
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == T::zero() {
            return Err(SingularMatrix);
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / diag;
            if factor == T::zero() {
                continue;
            }
            a[row * n + col] = T::zero();
            for j in col + 1..n {
                let upd = a[col * n + j] * factor;
                a[row * n + j] -= upd;
            }
            let upd = b[col] * factor;
            b[row] -= upd;
        }
    }
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= a[row * n + j] * b[j];
        }
        b[row] = acc / a[row * n + row];
    }
    Ok(())
}
