//! Periodic central-difference operators stored as circulant first rows.

use std::error::Error;
use std::fmt;

use crate::scalar::{cast, Real};

/// Circulant matrix, stored as its first row plus the nonzero offsets for
/// fast application.
#[derive(Debug, Clone, PartialEq)]
pub struct Circulant<T> {
    first_row: Vec<T>,
    nonzeros: Vec<(usize, T)>,
}

impl<T: Real> Circulant<T> {
    pub fn from_first_row(first_row: Vec<T>) -> Self {
        let nonzeros = first_row
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != T::zero())
            .map(|(k, &v)| (k, v))
            .collect();
        Self {
            first_row,
            nonzeros,
        }
    }

    pub fn n(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[T] {
        &self.first_row
    }

    /// out = C x, using only the nonzero stencil entries.
    pub fn apply(&self, x: &[T], out: &mut [T]) {
        let n = self.n();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = T::zero();
            for &(k, v) in &self.nonzeros {
                let idx = i + k;
                let idx = if idx >= n { idx - n } else { idx };
                acc += v * x[idx];
            }
            *o = acc;
        }
    }

    /// Matrix product of two circulants (circular convolution of rows).
    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.n();
        assert_eq!(rhs.n(), n, "circulant size mismatch");
        let mut row = vec![T::zero(); n];
        for &(p, a) in &self.nonzeros {
            for &(q, b) in &rhs.nonzeros {
                let k = (p + q) % n;
                row[k] += a * b;
            }
        }
        Self::from_first_row(row)
    }
}

/// First-, second-, and third-derivative circulants on a periodic grid.
#[derive(Debug, Clone)]
pub struct FdOperators<T> {
    pub d1: Circulant<T>,
    pub d2: Circulant<T>,
    pub d3: Circulant<T>,
    pub dx: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdError {
    GridTooSmall { n1: usize },
}

impl fmt::Display for FdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FdError::GridTooSmall { n1 } => {
                write!(f, "periodic stencils need at least 3 grid points, got {n1}")
            }
        }
    }
}

impl Error for FdError {}

/// Build D₁ (central first derivative), D₂ (central second derivative)
/// and D₃ = D₁·D₂ on a periodic grid of n1 points with spacing dx.
pub fn build_fd_operators<T: Real>(n1: usize, dx: T) -> Result<FdOperators<T>, FdError> {
    if n1 < 3 {
        return Err(FdError::GridTooSmall { n1 });
    }
    let half = T::one() / (cast::<T>(2.0) * dx);
    let inv_dx2 = T::one() / (dx * dx);

    let mut row1 = vec![T::zero(); n1];
    row1[1] = half;
    row1[n1 - 1] = -half;
    let d1 = Circulant::from_first_row(row1);

    let mut row2 = vec![T::zero(); n1];
    row2[0] = -cast::<T>(2.0) * inv_dx2;
    row2[1] = inv_dx2;
    row2[n1 - 1] = inv_dx2;
    let d2 = Circulant::from_first_row(row2);

    let d3 = d1.mul(&d2);
    Ok(FdOperators { d1, d2, d3, dx })
}
