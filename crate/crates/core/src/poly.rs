//! Polynomial algebra backing the continuous-stage tableaux.
//!
//! Coefficients are stored in ascending powers. The bivariate grid
//! [`BivarPoly`] represents the stage coefficient function A(τ, σ); its
//! σ-moments are what the order conditions constrain.

use crate::scalar::{cast_i32, Real};

/// Univariate polynomial with coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Real> Poly<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut p = Self { coeffs };
        if p.coeffs.is_empty() {
            p.coeffs.push(T::zero());
        }
        p
    }

    pub fn zero() -> Self {
        Self::new(vec![T::zero()])
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Degree ignoring trailing zero coefficients.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != T::zero())
            .unwrap_or(0)
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![T::zero(); n];
        for (i, c) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or_else(T::zero);
            let b = rhs.coeffs.get(i).copied().unwrap_or_else(T::zero);
            *c = a + b;
        }
        Self::new(out)
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut out = vec![T::zero(); self.coeffs.len() + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i + 1] = c / cast_i32::<T>(i as i32 + 1);
        }
        Self::new(out)
    }

    /// ∫₀¹ p(x) dx.
    pub fn integral01(&self) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c / cast_i32::<T>(i as i32 + 1))
            .sum()
    }

    /// The `i`-th Lagrange basis polynomial through the given nodes.
    pub fn lagrange_basis(nodes: &[T], i: usize) -> Self {
        let ci = nodes[i];
        let mut p = Self::constant(T::one());
        for (j, &cj) in nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            let denom = ci - cj;
            p = p.mul(&Self::new(vec![-cj / denom, T::one() / denom]));
        }
        p
    }
}

/// Bivariate polynomial in (τ, σ); `coeffs[i][j]` multiplies τ^i σ^j.
#[derive(Debug, Clone, PartialEq)]
pub struct BivarPoly<T> {
    coeffs: Vec<Vec<T>>,
}

impl<T: Real> BivarPoly<T> {
    /// Build from a rectangular coefficient grid.
    pub fn new(coeffs: Vec<Vec<T>>) -> Self {
        let width = coeffs.iter().map(Vec::len).max().unwrap_or(1).max(1);
        let mut grid: Vec<Vec<T>> = coeffs
            .into_iter()
            .map(|mut row| {
                row.resize(width, T::zero());
                row
            })
            .collect();
        if grid.is_empty() {
            grid.push(vec![T::zero(); width]);
        }
        Self { coeffs: grid }
    }

    pub fn zeros(deg_tau: usize, deg_sigma: usize) -> Self {
        Self {
            coeffs: vec![vec![T::zero(); deg_sigma + 1]; deg_tau + 1],
        }
    }

    pub fn coeffs(&self) -> &[Vec<T>] {
        &self.coeffs
    }

    pub fn add_term(&mut self, pow_tau: usize, pow_sigma: usize, value: T) {
        self.coeffs[pow_tau][pow_sigma] += value;
    }

    pub fn eval(&self, tau: T, sigma: T) -> T {
        let mut acc = T::zero();
        for row in self.coeffs.iter().rev() {
            let row_val = row.iter().rev().fold(T::zero(), |a, &c| a * sigma + c);
            acc = acc * tau + row_val;
        }
        acc
    }

    /// Freeze τ, returning the polynomial in σ.
    pub fn at_tau(&self, tau: T) -> Poly<T> {
        let width = self.coeffs[0].len();
        let mut out = vec![T::zero(); width];
        let mut tau_pow = T::one();
        for row in &self.coeffs {
            for (j, &c) in row.iter().enumerate() {
                out[j] += c * tau_pow;
            }
            tau_pow *= tau;
        }
        Poly::new(out)
    }

    /// σ-moment ∫₀¹ A(τ, σ) σ^{k−1} dσ as a polynomial in τ (k ≥ 1).
    pub fn sigma_moment(&self, k: usize) -> Poly<T> {
        assert!(k >= 1, "moment order must be at least 1");
        let out = self
            .coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, &c)| c / cast_i32::<T>((j + k) as i32))
                    .sum()
            })
            .collect();
        Poly::new(out)
    }

    /// Largest absolute coefficient difference against `other`.
    pub fn max_coeff_diff(&self, other: &Self) -> T {
        let rows = self.coeffs.len().max(other.coeffs.len());
        let cols = self.coeffs[0].len().max(other.coeffs[0].len());
        let at = |p: &Self, i: usize, j: usize| {
            p.coeffs
                .get(i)
                .and_then(|r| r.get(j))
                .copied()
                .unwrap_or_else(T::zero)
        };
        let mut worst = T::zero();
        for i in 0..rows {
            for j in 0..cols {
                worst = worst.max((at(self, i, j) - at(other, i, j)).abs());
            }
        }
        worst
    }
}
