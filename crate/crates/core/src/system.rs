//! The damped-Hamiltonian problem interface ẋ = S(x)∇H(x) − D(t)x.
//!
//! `D(t)` is diagonal; systems report its entries and, crucially, their
//! elementwise antiderivative Φ, so the exponential transform inside a
//! step can be evaluated in closed form instead of through a second
//! quadrature.

use crate::scalar::Real;

/// A damped Hamiltonian system in the split form ẋ = S∇H(x) − D(t)x.
///
/// Implementations must keep `skew_apply` skew-symmetric for every frozen
/// argument pair `(t_mid, x_mid)`; the dissipation-rate guarantees of the
/// stepper rest on that.
pub trait DampedSystem<T: Real>: Send + Sync {
    /// State dimension N₁.
    fn dim(&self) -> usize;

    /// out = S z, with any time/state dependence of S frozen at
    /// `(t_mid, x_mid)`.
    fn skew_apply(&self, t_mid: T, x_mid: &[T], z: &[T], out: &mut [T]);

    /// out = ∇H(x).
    fn grad_h(&self, x: &[T], out: &mut [T]);

    /// H(x).
    fn energy(&self, x: &[T]) -> T;

    /// Diagonal entries of D(t).
    fn damping_diag(&self, t: T, out: &mut [T]);

    /// Elementwise antiderivative Φ(t) with Φ' = diagonal of D.
    fn damping_antideriv(&self, t: T, out: &mut [T]);

    /// Functionals tracked by the diagnostics.
    fn invariants(&self) -> &[Invariant<T>];
}

type EvalFn<T> = Box<dyn Fn(&[T]) -> T + Send + Sync>;
type EtaFn<T> = Box<dyn Fn(T) -> T + Send + Sync>;
type EtaIntegralFn<T> = Box<dyn Fn(T, T) -> T + Send + Sync>;

/// A monitored functional I(x), optionally with its known conformal decay
/// law dI/dt = −η(t)I.
pub struct Invariant<T> {
    name: String,
    eval: EvalFn<T>,
    eta: Option<EtaFn<T>>,
    eta_integral: Option<EtaIntegralFn<T>>,
}

impl<T: Real> Invariant<T> {
    /// Invariant without a known decay law; residuals fall back to the
    /// averaged-damping formula.
    pub fn monitored(
        name: impl Into<String>,
        eval: impl Fn(&[T]) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Box::new(eval),
            eta: None,
            eta_integral: None,
        }
    }

    /// Invariant with a known conformal rate η(t) and its exact integral.
    pub fn conformal(
        name: impl Into<String>,
        eval: impl Fn(&[T]) -> T + Send + Sync + 'static,
        eta: impl Fn(T) -> T + Send + Sync + 'static,
        eta_integral: impl Fn(T, T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Box::new(eval),
            eta: Some(Box::new(eta)),
            eta_integral: Some(Box::new(eta_integral)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: &[T]) -> T {
        (self.eval)(x)
    }

    pub fn has_eta(&self) -> bool {
        self.eta.is_some()
    }

    pub fn eta(&self, t: T) -> Option<T> {
        self.eta.as_ref().map(|f| f(t))
    }

    /// ∫_a^b η(s) ds when the law is known.
    pub fn eta_integral(&self, a: T, b: T) -> Option<T> {
        self.eta_integral.as_ref().map(|f| f(a, b))
    }
}

impl<T> std::fmt::Debug for Invariant<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Invariant")
            .field("name", &self.name)
            .field("has_eta", &self.eta.is_some())
            .finish()
    }
}
