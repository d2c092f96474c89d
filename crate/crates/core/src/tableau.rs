//! Continuous-stage Runge–Kutta tableaux of orders 2s for s = 1..4.
//!
//! The coefficient function A(τ, σ) is a bivariate polynomial satisfying
//! the moment conditions ∫₀¹ A(τ, σ) σ^{k−1} dσ = τ^k / k for k = 1..s,
//! together with the end-point normalization A(1, σ) ≡ 1 (unit final
//! weight). These conditions pin A uniquely within its degree class, so
//! the shipped closed forms and the generic Lagrange-basis construction
//! [`make_tableau_general`] must agree; tests rely on that.

use std::error::Error;
use std::fmt;

use crate::poly::{BivarPoly, Poly};
use crate::quadrature::{gauss_legendre, QuadratureRule};
use crate::scalar::{cast_i32, Real};

/// Default number of Gauss–Legendre points used for the σ-integrals.
///
/// Exact through polynomial degree 15, which covers cubic energies up to
/// s = 4 (the stage integrands there have degree s·d − 1 = 11).
pub const DEFAULT_QUADRATURE_POINTS: usize = 8;

/// Stage-coefficient tableau for one member of the collocation family.
#[derive(Debug, Clone)]
pub struct CollocationTableau<T> {
    s: usize,
    nodes: Vec<T>,
    a: BivarPoly<T>,
    quadrature: QuadratureRule<T>,
}

impl<T: Real> CollocationTableau<T> {
    /// Stage count s.
    pub fn stage_count(&self) -> usize {
        self.s
    }

    /// Classical order of the method, 2s.
    pub fn order(&self) -> usize {
        2 * self.s
    }

    /// The s + 1 equispaced interpolation abscissae j/s on [0, 1].
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// The bivariate coefficient polynomial A(τ, σ).
    pub fn a_coeffs(&self) -> &BivarPoly<T> {
        &self.a
    }

    /// Quadrature rule used for the σ-integrals.
    pub fn quadrature(&self) -> &QuadratureRule<T> {
        &self.quadrature
    }

    pub fn eval_a(&self, tau: T, sigma: T) -> T {
        self.a.eval(tau, sigma)
    }

    /// A(τ, ·) as a polynomial in σ.
    pub fn a_row(&self, tau: T) -> Poly<T> {
        self.a.at_tau(tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableauError {
    /// Closed forms ship for s = 1..4 only (general construction: s ≥ 1).
    UnsupportedStageCount(usize),
}

impl fmt::Display for TableauError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableauError::UnsupportedStageCount(s) => {
                write!(f, "unsupported stage count {s}")
            }
        }
    }
}

impl Error for TableauError {}

/// Closed-form tableau of order 2s for s in 1..4, with the default
/// 8-point quadrature.
pub fn make_tableau<T: Real>(s: usize) -> Result<CollocationTableau<T>, TableauError> {
    make_tableau_with_quadrature(s, DEFAULT_QUADRATURE_POINTS)
}

/// Closed-form tableau with a caller-chosen number of quadrature points.
pub fn make_tableau_with_quadrature<T: Real>(
    s: usize,
    quadrature_points: usize,
) -> Result<CollocationTableau<T>, TableauError> {
    let grid = closed_form_grid(s).ok_or(TableauError::UnsupportedStageCount(s))?;
    let a = BivarPoly::new(
        grid.iter()
            .map(|row| row.iter().map(|&c| cast_i32::<T>(c)).collect())
            .collect(),
    );
    Ok(CollocationTableau {
        s,
        nodes: equispaced_nodes(s),
        a,
        quadrature: gauss_legendre(quadrature_points),
    })
}

/// Tableau assembled from the Lagrange basis over s Gauss–Legendre
/// collocation points: A(τ, σ) = Σ_i (1/b_i) ∫₀^τ ℓ_i · ℓ_i(σ).
///
/// For s ≤ 4 this reproduces [`make_tableau`] coefficient-wise; it exists
/// for cross-validation and for order-condition checks at larger s, not
/// as the default construction path.
pub fn make_tableau_general<T: Real>(s: usize) -> Result<CollocationTableau<T>, TableauError> {
    make_tableau_general_with_quadrature(s, DEFAULT_QUADRATURE_POINTS)
}

pub fn make_tableau_general_with_quadrature<T: Real>(
    s: usize,
    quadrature_points: usize,
) -> Result<CollocationTableau<T>, TableauError> {
    if s < 1 {
        return Err(TableauError::UnsupportedStageCount(s));
    }
    // the monomial grid entries grow like 10³ while individual basis terms
    // cancel, so the assembly runs in double-double precision and is only
    // rounded once at the end
    let grid = dd::general_grid(s);
    let a = BivarPoly::new(
        grid.iter()
            .map(|row| {
                row.iter()
                    .map(|&c| T::from_f64(c).expect("coefficient fits scalar"))
                    .collect()
            })
            .collect(),
    );
    Ok(CollocationTableau {
        s,
        nodes: equispaced_nodes(s),
        a,
        quadrature: gauss_legendre(quadrature_points),
    })
}

fn equispaced_nodes<T: Real>(s: usize) -> Vec<T> {
    (0..=s)
        .map(|j| cast_i32::<T>(j as i32) / cast_i32::<T>(s as i32))
        .collect()
}

/// Integer coefficient grids of the closed-form A(τ, σ); entry [i][j]
/// multiplies τ^i σ^j.
fn closed_form_grid(s: usize) -> Option<Vec<Vec<i32>>> {
    let grid = match s {
        // A = τ (the averaged vector field method)
        1 => vec![vec![0], vec![1]],
        // A = τ(4 − 3τ) − 6τ(1 − τ)σ
        2 => vec![vec![0, 0], vec![4, -6], vec![-3, 6]],
        // A = τ((9 − 18τ + 10τ²) − 12(3 − 8τ + 5τ²)σ + 30(1 − 3τ + 2τ²)σ²)
        3 => vec![
            vec![0, 0, 0],
            vec![9, -36, 30],
            vec![-18, 96, -90],
            vec![10, -60, 60],
        ],
        // order-8 member; columns are the σ⁰..σ³ coefficient polynomials in τ
        4 => vec![
            vec![0, 0, 0, 0],
            vec![16, -120, 240, -140],
            vec![-60, 600, -1350, 840],
            vec![80, -900, 2160, -1400],
            vec![-35, 420, -1050, 700],
        ],
        _ => return None,
    };
    Some(grid)
}

/// Double-double arithmetic for the Lagrange-basis tableau assembly.
mod dd {
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct Dd {
        hi: f64,
        lo: f64,
    }

    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        let err = a.mul_add(b, -p);
        Dd { hi: p, lo: err }
    }

    pub fn add(a: Dd, b: Dd) -> Dd {
        let s = two_sum(a.hi, b.hi);
        quick_two_sum(s.hi, s.lo + a.lo + b.lo)
    }

    pub fn sub(a: Dd, b: Dd) -> Dd {
        add(
            a,
            Dd {
                hi: -b.hi,
                lo: -b.lo,
            },
        )
    }

    pub fn mul(a: Dd, b: Dd) -> Dd {
        let p = two_prod(a.hi, b.hi);
        quick_two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi)
    }

    pub fn div(a: Dd, b: Dd) -> Dd {
        let q1 = a.hi / b.hi;
        let r = sub(a, mul(from(q1), b));
        let q2 = r.hi / b.hi;
        let r2 = sub(r, mul(from(q2), b));
        let q3 = r2.hi / b.hi;
        add(quick_two_sum(q1, q2), from(q3))
    }

    pub fn to_f64(a: Dd) -> f64 {
        a.hi + a.lo
    }

    /// (P_q(x), P_q'(x)) in double-double.
    fn legendre(q: usize, x: Dd) -> (Dd, Dd) {
        let mut p_prev = ONE;
        let mut p = x;
        for k in 2..=q {
            let kf = from(k as f64);
            let lead = mul(sub(mul(from(2.0), kf), ONE), mul(x, p));
            let next = div(sub(lead, mul(sub(kf, ONE), p_prev)), kf);
            p_prev = p;
            p = next;
        }
        let qf = from(q as f64);
        let dp = div(mul(qf, sub(mul(x, p), p_prev)), sub(mul(x, x), ONE));
        (p, dp)
    }

    /// Gauss–Legendre collocation points on [0, 1] to double-double
    /// accuracy: f64 Newton seeds polished by three dd Newton steps.
    fn gauss_nodes(q: usize) -> Vec<Dd> {
        let seed = crate::quadrature::gauss_legendre::<f64>(q);
        seed.nodes()
            .iter()
            .map(|&n| {
                // back to [−1, 1] for the Legendre recurrence
                let mut x = from(2.0 * n - 1.0);
                if q > 1 {
                    for _ in 0..3 {
                        let (p, dp) = legendre(q, x);
                        x = sub(x, div(p, dp));
                    }
                } else {
                    x = ZERO;
                }
                div(add(x, ONE), from(2.0))
            })
            .collect()
    }

    fn poly_antiderivative(p: &[Dd]) -> Vec<Dd> {
        let mut out = vec![ZERO; p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            out[i + 1] = div(c, from(i as f64 + 1.0));
        }
        out
    }

    fn poly_integral01(p: &[Dd]) -> Dd {
        let mut acc = ZERO;
        for (i, &c) in p.iter().enumerate() {
            acc = add(acc, div(c, from(i as f64 + 1.0)));
        }
        acc
    }

    /// Monomial grid of A(τ, σ) = Σ_i (1/b_i) ∫₀^τ ℓ_i · ℓ_i(σ).
    pub fn general_grid(s: usize) -> Vec<Vec<f64>> {
        let nodes = gauss_nodes(s);
        let mut grid = vec![vec![ZERO; s]; s + 1];
        for i in 0..s {
            // ℓ_i as dd monomial coefficients
            let mut basis = vec![ONE];
            for (j, &cj) in nodes.iter().enumerate() {
                if j == i {
                    continue;
                }
                let denom = sub(nodes[i], cj);
                let mut next = vec![ZERO; basis.len() + 1];
                for (k, &c) in basis.iter().enumerate() {
                    let scaled = div(c, denom);
                    next[k + 1] = add(next[k + 1], scaled);
                    next[k] = sub(next[k], mul(scaled, cj));
                }
                basis = next;
            }
            let weight = poly_integral01(&basis);
            let primitive = poly_antiderivative(&basis);
            for (pow_tau, &ct) in primitive.iter().enumerate() {
                for (pow_sigma, &cs) in basis.iter().enumerate() {
                    let term = div(mul(ct, cs), weight);
                    grid[pow_tau][pow_sigma] = add(grid[pow_tau][pow_sigma], term);
                }
            }
        }
        grid.into_iter()
            .map(|row| row.into_iter().map(to_f64).collect())
            .collect()
    }
}
