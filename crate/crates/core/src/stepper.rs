//! One-step integration of ẋ = S∇H(x) − D(t)x.
//!
//! The step applies a continuous-stage collocation method to the
//! exponentially transformed variable v(t) = e^{Y(t)}x(t), with
//! Y(t) = Φ(t) − Φ(t₀ + h/2) taken elementwise from the system's damping
//! antiderivative. In transformed variables the stage equations read
//!
//!   w_j = w_0 + h Σ_q ω_q A(τ_j, σ_q) S∇H(v(σ_q)),   τ_j = j/s,
//!
//! where v is the degree-s polynomial through the node values w_0..w_s
//! and w_0 = e^{Y(t₀)}x₀. The new state is x₁ = e^{−Y(t₁)}w_s. Measuring
//! Y from the step midpoint makes the scheme symmetric; evaluating the
//! undamped field on the transformed polynomial is what preserves the
//! dissipation rates of compatible invariants.
//!
//! When S depends on time or state it is frozen at
//! (t_mid, (w_0 + w_s)/2) and re-frozen on every solver sweep, so the
//! frozen point participates in the fixed point.

use std::error::Error;
use std::fmt;

use crate::linalg::{max_abs_diff, norm_inf, solve_dense};
use crate::scalar::{cast, Real};
use crate::system::DampedSystem;
use crate::tableau::CollocationTableau;

/// Time window of a single step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepContext<T> {
    pub t0: T,
    pub h: T,
}

impl<T: Real> StepContext<T> {
    pub fn new(t0: T, h: T) -> Self {
        Self { t0, h }
    }

    pub fn t_end(&self) -> T {
        self.t0 + self.h
    }

    /// Transform reference time: the midpoint of the step, also for
    /// negative h.
    pub fn t_ref(&self) -> T {
        self.t0 + self.h / cast::<T>(2.0)
    }
}

/// How the implicit stage equations are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStrategy {
    /// Picard sweeps from the initial guess w_j = w_0; contraction factor
    /// scales with h, so this is the default for small steps.
    FixedPoint,
    /// Newton on the stacked stage residual with a finite-difference
    /// Jacobian; for steps too coarse for the fixed point to contract.
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    /// Relative tolerance on the stage increment; the test is
    /// ‖Δw‖∞ ≤ tol·(1 + ‖w₀‖∞), which degrades to an absolute test at
    /// the origin.
    pub tol: T,
    pub max_iter: usize,
    pub strategy: SolveStrategy,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        // 1e-13 where the precision allows it (f64); otherwise a fixed
        // multiple of machine epsilon
        let tol = cast::<T>(1e-13).max(T::epsilon() * cast::<T>(100.0));
        Self {
            tol,
            max_iter: 100,
            strategy: SolveStrategy::FixedPoint,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepError<T> {
    /// Stage iteration failed to meet the tolerance within `iterations`.
    NonConvergence {
        residual: T,
        iterations: usize,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// Newton only: the finite-difference Jacobian was singular.
    SingularJacobian,
}

impl<T: fmt::Display> fmt::Display for StepError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepError::NonConvergence {
                residual,
                iterations,
            } => write!(
                f,
                "stage solve did not converge: residual {residual} after {iterations} iterations"
            ),
            StepError::DimensionMismatch { expected, found } => {
                write!(f, "state has dimension {found}, system needs {expected}")
            }
            StepError::SingularJacobian => write!(f, "stage Jacobian is singular"),
        }
    }
}

impl<T: fmt::Display + fmt::Debug> Error for StepError<T> {}

/// The degree-s interpolant through the transformed node values
/// w_j ≈ v(t₀ + (j/s)h); node 0 holds e^{Y₀}x₀ and node s feeds x₁.
#[derive(Debug, Clone)]
pub struct StagePolynomial<T> {
    t0: T,
    h: T,
    node_values: Vec<Vec<T>>,
}

impl<T: Real> StagePolynomial<T> {
    pub fn stage_count(&self) -> usize {
        self.node_values.len() - 1
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// Node values w_0..w_s.
    pub fn node_values(&self) -> &[Vec<T>] {
        &self.node_values
    }

    /// Value of the interpolant at t₀ + τh.
    pub fn eval(&self, tau: T) -> Vec<T> {
        let s = self.stage_count();
        let nodes: Vec<T> = (0..=s)
            .map(|j| cast::<T>(j as f64) / cast::<T>(s as f64))
            .collect();
        let weights = lagrange_weights(&nodes, tau);
        let n = self.node_values[0].len();
        let mut out = vec![T::zero(); n];
        for (w, values) in weights.iter().zip(&self.node_values) {
            for (o, &v) in out.iter_mut().zip(values) {
                *o += *w * v;
            }
        }
        out
    }
}

/// Cardinal (Lagrange) weights of the given nodes at evaluation point x.
pub fn lagrange_weights<T: Real>(nodes: &[T], x: T) -> Vec<T> {
    let mut out = vec![T::one(); nodes.len()];
    for (m, w) in out.iter_mut().enumerate() {
        for (j, &cj) in nodes.iter().enumerate() {
            if j != m {
                *w = *w * (x - cj) / (nodes[m] - cj);
            }
        }
    }
    out
}

/// Result of one accepted step.
#[derive(Debug, Clone)]
pub struct StepResult<T> {
    pub x1: Vec<T>,
    /// Solver iterations spent on the stage equations.
    pub iterations: usize,
    pub stages: StagePolynomial<T>,
}

/// Advance the system one step of size ctx.h from (ctx.t0, x0).
pub fn step_eepc<T: Real, S: DampedSystem<T> + ?Sized>(
    sys: &S,
    ctx: StepContext<T>,
    x0: &[T],
    tab: &CollocationTableau<T>,
    opts: &SolverOptions<T>,
) -> Result<StepResult<T>, StepError<T>> {
    let n = sys.dim();
    if x0.len() != n {
        return Err(StepError::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    let s = tab.stage_count();
    let t_ref = ctx.t_ref();
    let t1 = ctx.t_end();
    let t_mid = t_ref;

    // Y(t) = Φ(t) − Φ(t_ref), elementwise
    let mut phi_ref = vec![T::zero(); n];
    let mut phi = vec![T::zero(); n];
    sys.damping_antideriv(t_ref, &mut phi_ref);
    sys.damping_antideriv(ctx.t0, &mut phi);
    let mut w0 = vec![T::zero(); n];
    for ((w, &p), (&pr, &x)) in w0.iter_mut().zip(&phi).zip(phi_ref.iter().zip(x0)) {
        *w = (p - pr).exp() * x;
    }

    // quadrature-time stage machinery
    let quad = tab.quadrature();
    let q_count = quad.len();
    let lag: Vec<Vec<T>> = {
        let mut per_node = vec![vec![T::zero(); q_count]; s + 1];
        for (q, &sigma) in quad.nodes().iter().enumerate() {
            let w = lagrange_weights(tab.nodes(), sigma);
            for (m, &wm) in w.iter().enumerate() {
                per_node[m][q] = wm;
            }
        }
        per_node
    };
    let coeff: Vec<Vec<T>> = (1..=s)
        .map(|j| {
            let tau = tab.nodes()[j];
            quad.nodes()
                .iter()
                .zip(quad.weights())
                .map(|(&sigma, &omega)| omega * tab.eval_a(tau, sigma))
                .collect()
        })
        .collect();

    let mut scratch = SweepScratch::new(n, q_count);
    let sweep = |w: &[Vec<T>], out: &mut [Vec<T>]| {
        scratch.run(sys, t_mid, ctx.h, &w0, &lag, &coeff, w, out);
    };

    let (stages, iterations) = match opts.strategy {
        SolveStrategy::FixedPoint => solve_stages_fixed_point(sweep, &w0, s, opts)?,
        SolveStrategy::Newton => solve_stages_newton(sweep, &w0, s, opts)?,
    };

    // x1 = e^{−Y(t1)} w_s
    sys.damping_antideriv(t1, &mut phi);
    let w_last = stages.last().unwrap_or(&w0);
    let x1 = w_last
        .iter()
        .zip(phi.iter().zip(&phi_ref))
        .map(|(&w, (&p, &pr))| (pr - p).exp() * w)
        .collect();

    let mut node_values = Vec::with_capacity(s + 1);
    node_values.push(w0);
    node_values.extend(stages);
    Ok(StepResult {
        x1,
        iterations,
        stages: StagePolynomial {
            t0: ctx.t0,
            h: ctx.h,
            node_values,
        },
    })
}

/// Scratch buffers for one stage sweep; the sweep maps current node
/// values w_1..w_s to their next iterate.
struct SweepScratch<T> {
    v: Vec<T>,
    grad: Vec<T>,
    f_at_quad: Vec<Vec<T>>,
    x_mid: Vec<T>,
}

impl<T: Real> SweepScratch<T> {
    fn new(n: usize, q_count: usize) -> Self {
        Self {
            v: vec![T::zero(); n],
            grad: vec![T::zero(); n],
            f_at_quad: vec![vec![T::zero(); n]; q_count],
            x_mid: vec![T::zero(); n],
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn run<S: DampedSystem<T> + ?Sized>(
        &mut self,
        sys: &S,
        t_mid: T,
        h: T,
        w0: &[T],
        lag: &[Vec<T>],
        coeff: &[Vec<T>],
        w: &[Vec<T>],
        out: &mut [Vec<T>],
    ) {
        let s = w.len();
        let half = cast::<T>(0.5);
        let w_last = w.last().map(|v| v.as_slice()).unwrap_or(w0);
        for (m, (&a, &b)) in w0.iter().zip(w_last).enumerate() {
            self.x_mid[m] = half * (a + b);
        }
        for (q, f_q) in self.f_at_quad.iter_mut().enumerate() {
            // v(σ_q) = Σ_m L_m(σ_q) w_m
            for (i, v) in self.v.iter_mut().enumerate() {
                let mut acc = lag[0][q] * w0[i];
                for (j, wj) in w.iter().enumerate() {
                    acc += lag[j + 1][q] * wj[i];
                }
                *v = acc;
            }
            sys.grad_h(&self.v, &mut self.grad);
            sys.skew_apply(t_mid, &self.x_mid, &self.grad, f_q);
        }
        for j in 0..s {
            let row = &coeff[j];
            let out_j = &mut out[j];
            out_j.copy_from_slice(w0);
            for (q, f_q) in self.f_at_quad.iter().enumerate() {
                let c = h * row[q];
                for (o, &f) in out_j.iter_mut().zip(f_q) {
                    *o += c * f;
                }
            }
        }
    }
}

/// Solve the stage equations by Picard iteration of the sweep map from
/// the initial guess w_j = w_0, stopping when the largest node update
/// satisfies ‖Δw‖∞ ≤ tol·(1 + ‖w₀‖∞). Returns the node values w_1..w_s
/// and the number of sweeps.
pub fn solve_stages_fixed_point<T: Real, F>(
    mut sweep: F,
    w0: &[T],
    stage_count: usize,
    opts: &SolverOptions<T>,
) -> Result<(Vec<Vec<T>>, usize), StepError<T>>
where
    F: FnMut(&[Vec<T>], &mut [Vec<T>]),
{
    let threshold = opts.tol * (T::one() + norm_inf(w0));
    let mut w = vec![w0.to_vec(); stage_count];
    let mut next = vec![vec![T::zero(); w0.len()]; stage_count];
    let mut residual = T::infinity();
    for iter in 1..=opts.max_iter {
        sweep(&w, &mut next);
        residual = w
            .iter()
            .zip(&next)
            .fold(T::zero(), |m, (a, b)| m.max(max_abs_diff(a, b)));
        std::mem::swap(&mut w, &mut next);
        if residual <= threshold {
            return Ok((w, iter));
        }
    }
    Err(StepError::NonConvergence {
        residual,
        iterations: opts.max_iter,
    })
}

/// Solve the stage equations by Newton iteration on the stacked residual
/// G(W) = W − sweep(W), with a forward-difference Jacobian rebuilt every
/// iteration.
pub fn solve_stages_newton<T: Real, F>(
    mut sweep: F,
    w0: &[T],
    stage_count: usize,
    opts: &SolverOptions<T>,
) -> Result<(Vec<Vec<T>>, usize), StepError<T>>
where
    F: FnMut(&[Vec<T>], &mut [Vec<T>]),
{
    let n = w0.len();
    let m = stage_count * n;
    let threshold = opts.tol * (T::one() + norm_inf(w0));
    let eps = T::epsilon().sqrt();

    let mut w = vec![w0.to_vec(); stage_count];
    let mut image = vec![vec![T::zero(); n]; stage_count];
    let mut image_pert = vec![vec![T::zero(); n]; stage_count];
    let mut jac = vec![T::zero(); m * m];
    let mut rhs = vec![T::zero(); m];

    for iter in 1..=opts.max_iter {
        sweep(&w, &mut image);
        // rhs = −G(W) = sweep(W) − W
        let mut residual_norm = T::zero();
        for j in 0..stage_count {
            for i in 0..n {
                let g = w[j][i] - image[j][i];
                rhs[j * n + i] = -g;
                residual_norm = residual_norm.max(g.abs());
            }
        }
        if residual_norm <= threshold {
            return Ok((w, iter));
        }
        for col in 0..m {
            let (j, i) = (col / n, col % n);
            let base = w[j][i];
            let delta = eps * (T::one() + base.abs());
            w[j][i] = base + delta;
            sweep(&w, &mut image_pert);
            w[j][i] = base;
            for row in 0..m {
                let (rj, ri) = (row / n, row % n);
                let dsweep = (image_pert[rj][ri] - image[rj][ri]) / delta;
                let identity = if row == col { T::one() } else { T::zero() };
                jac[row * m + col] = identity - dsweep;
            }
        }
        if solve_dense(&mut jac, &mut rhs).is_err() {
            return Err(StepError::SingularJacobian);
        }
        for j in 0..stage_count {
            for i in 0..n {
                w[j][i] += rhs[j * n + i];
            }
        }
    }
    sweep(&w, &mut image);
    let mut residual = T::zero();
    for j in 0..stage_count {
        residual = residual.max(max_abs_diff(&w[j], &image[j]));
    }
    Err(StepError::NonConvergence {
        residual,
        iterations: opts.max_iter,
    })
}
