//! Gauss–Legendre quadrature on [0, 1].
//!
//! The stage equations integrate polynomials of degree up to s·d − 1 in σ
//! (d = polynomial degree of the energy), so the rule's exactness degree
//! 2q − 1 is what decides whether the conservation identities hold to
//! machine precision.

use crate::scalar::{cast, Real};

/// Nodes and weights of a quadrature rule on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Σ ω_q f(σ_q).
    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// q-point Gauss–Legendre rule on [0, 1], exact for degree ≤ 2q − 1.
pub fn gauss_legendre<T: Real>(q: usize) -> QuadratureRule<T> {
    assert!(q >= 1, "quadrature needs at least one node");
    let mut nodes = vec![T::zero(); q];
    let mut weights = vec![T::zero(); q];
    let half = cast::<T>(0.5);
    let tol = T::epsilon() * cast::<T>(4.0);
    // roots of P_q on [−1, 1], found by Newton from the Chebyshev-like guess
    for i in 0..q {
        let guess = (cast::<T>(std::f64::consts::PI) * (cast::<T>(i as f64) + cast::<T>(0.75))
            / (cast::<T>(q as f64) + half))
            .cos();
        let mut x = guess;
        let mut deriv = T::one();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(q, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= tol * (T::one() + x.abs()) {
                let (_, dp) = legendre_with_derivative(q, x);
                deriv = dp;
                break;
            }
        }
        // descending guesses → ascending nodes after the flip below
        nodes[q - 1 - i] = (x + T::one()) * half;
        weights[q - 1 - i] = T::one() / ((T::one() - x * x) * deriv * deriv);
    }
    QuadratureRule { nodes, weights }
}

/// (P_q(x), P_q'(x)) via the three-term recurrence.
fn legendre_with_derivative<T: Real>(q: usize, x: T) -> (T, T) {
    let mut p_prev = T::one();
    let mut p = x;
    if q == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=q {
        let kf = cast::<T>(k as f64);
        let next = ((cast::<T>(2.0) * kf - T::one()) * x * p - (kf - T::one()) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    let qf = cast::<T>(q as f64);
    let dp = qf * (x * p - p_prev) / (x * x - T::one());
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_rule_is_midpoint() {
        let rule = gauss_legendre::<f64>(1);
        assert!((rule.nodes()[0] - 0.5).abs() < 1e-15);
        assert!((rule.weights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_rule_matches_closed_form() {
        let rule = gauss_legendre::<f64>(2);
        let lo = (1.0 - 1.0 / 3.0_f64.sqrt()) / 2.0;
        let hi = (1.0 + 1.0 / 3.0_f64.sqrt()) / 2.0;
        assert!((rule.nodes()[0] - lo).abs() < 1e-15);
        assert!((rule.nodes()[1] - hi).abs() < 1e-15);
        assert!((rule.weights()[0] - 0.5).abs() < 1e-15);
        assert!((rule.weights()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eight_point_rule_integrates_degree_fifteen() {
        let rule = gauss_legendre::<f64>(8);
        let got = rule.integrate(|x| x.powi(15));
        assert!((got - 1.0 / 16.0).abs() < 1e-14, "got {got}");
    }

    #[test]
    fn weights_sum_to_one_and_nodes_increase() {
        for q in 1..=12 {
            let rule = gauss_legendre::<f64>(q);
            let sum: f64 = rule.weights().iter().sum();
            assert!((sum - 1.0).abs() < 1e-13, "q={q} sum={sum}");
            for w in rule.weights() {
                assert!(*w > 0.0);
            }
            for pair in rule.nodes().windows(2) {
                assert!(pair[0] < pair[1]);
            }
            assert!(rule.nodes()[0] > 0.0 && rule.nodes()[q - 1] < 1.0);
        }
    }

    #[test]
    fn exactness_degree_is_2q_minus_1() {
        for q in 1..=6 {
            let rule = gauss_legendre::<f64>(q);
            for deg in 0..=(2 * q - 1) {
                let got = rule.integrate(|x| x.powi(deg as i32));
                let want = 1.0 / (deg as f64 + 1.0);
                assert!(
                    (got - want).abs() < 1e-13,
                    "q={q} deg={deg} got={got} want={want}"
                );
            }
            // one degree higher must fail for the monomial basis
            let deg = 2 * q;
            let got = rule.integrate(|x| x.powi(deg as i32));
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((got - want).abs() > 1e-9, "q={q} should not be exact");
        }
    }

    #[test]
    fn f32_rule_is_consistent() {
        let rule = gauss_legendre::<f32>(4);
        let sum: f32 = rule.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-6);
        let got = rule.integrate(|x| x * x);
        assert!((got - 1.0 / 3.0).abs() < 1e-6);
    }
}
