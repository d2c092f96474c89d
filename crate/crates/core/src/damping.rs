//! Damping profiles D(t) = diag(2γ_k(t)) and their antiderivatives.
//!
//! The equations of motion carry the damping as −2γu, so the diagonal of
//! D(t) in ẋ = S∇H − D(t)x absorbs the factor 2: every entry reported
//! here is 2γ_k(t), and all rate bookkeeping (η, Φ) works with those
//! entries, not with the bare γ.

use std::error::Error;
use std::fmt;

use crate::scalar::{cast, Real};

/// Deterministic 64-bit generator (SplitMix64, Steele et al. 2014) used
/// for the seeded damping perturbations. The algorithm is fixed so that a
/// recorded seed reproduces the same diagonal on any platform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [−1, 1).
    pub fn next_symmetric(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }
}

/// Declarative damping profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DampingCase<T> {
    /// γ_k ≡ γ.
    ConstantEqual { gamma: T },
    /// γ_k = γ(1 + spread·u_k), u_k uniform in [−1, 1) from the seed.
    ConstantUnequal {
        gamma: T,
        spread: T,
        seed: Option<u64>,
    },
    /// γ_k(t) = scale·e^{−t}, equal across components.
    TimeDependentEqual { scale: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DampingError {
    /// The unequal case is randomized and must be seeded to be
    /// reproducible.
    MissingSeed,
}

impl fmt::Display for DampingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DampingError::MissingSeed => {
                write!(f, "constant-unequal damping requires a seed")
            }
        }
    }
}

impl Error for DampingError {}

/// Resolved damping: evaluates the diagonal of D(t) and its elementwise
/// antiderivative Φ(t).
#[derive(Debug, Clone)]
pub struct Damping<T> {
    kind: Kind<T>,
}

#[derive(Debug, Clone)]
enum Kind<T> {
    ConstantEqual { gamma: T },
    ConstantUnequal { gammas: Vec<T> },
    ExpEqual { scale: T },
}

/// Materialize a damping case for a state of the given dimension.
pub fn make_damping<T: Real>(
    case: &DampingCase<T>,
    dim: usize,
) -> Result<Damping<T>, DampingError> {
    let kind = match *case {
        DampingCase::ConstantEqual { gamma } => Kind::ConstantEqual { gamma },
        DampingCase::ConstantUnequal {
            gamma,
            spread,
            seed,
        } => {
            let seed = seed.ok_or(DampingError::MissingSeed)?;
            let mut rng = SplitMix64::new(seed);
            let gammas = (0..dim)
                .map(|_| gamma * (T::one() + spread * cast::<T>(rng.next_symmetric())))
                .collect();
            Kind::ConstantUnequal { gammas }
        }
        DampingCase::TimeDependentEqual { scale } => Kind::ExpEqual { scale },
    };
    Ok(Damping { kind })
}

impl<T: Real> Damping<T> {
    /// Entries of D(t): 2γ_k(t).
    pub fn diag(&self, t: T, out: &mut [T]) {
        let two = cast::<T>(2.0);
        match &self.kind {
            Kind::ConstantEqual { gamma } => out.fill(two * *gamma),
            Kind::ConstantUnequal { gammas } => {
                for (o, &g) in out.iter_mut().zip(gammas) {
                    *o = two * g;
                }
            }
            Kind::ExpEqual { scale } => out.fill(two * *scale * (-t).exp()),
        }
    }

    /// Elementwise Φ(t) with Φ' equal to the diagonal of D.
    pub fn antideriv(&self, t: T, out: &mut [T]) {
        let two = cast::<T>(2.0);
        match &self.kind {
            Kind::ConstantEqual { gamma } => out.fill(two * *gamma * t),
            Kind::ConstantUnequal { gammas } => {
                for (o, &g) in out.iter_mut().zip(gammas) {
                    *o = two * g * t;
                }
            }
            Kind::ExpEqual { scale } => out.fill(-two * *scale * (-t).exp()),
        }
    }

    /// Whether all diagonal entries coincide (conformal laws need this).
    pub fn is_equal_diagonal(&self) -> bool {
        !matches!(self.kind, Kind::ConstantUnequal { .. })
    }

    /// Common diagonal entry d(t) = 2γ(t), when equal.
    pub fn common_rate(&self, t: T) -> Option<T> {
        match &self.kind {
            Kind::ConstantEqual { gamma } => Some(cast::<T>(2.0) * *gamma),
            Kind::ConstantUnequal { .. } => None,
            Kind::ExpEqual { scale } => Some(cast::<T>(2.0) * *scale * (-t).exp()),
        }
    }

    /// ∫_a^b d(s) ds for the common entry, when equal.
    pub fn common_rate_integral(&self, a: T, b: T) -> Option<T> {
        let two = cast::<T>(2.0);
        match &self.kind {
            Kind::ConstantEqual { gamma } => Some(two * *gamma * (b - a)),
            Kind::ConstantUnequal { .. } => None,
            Kind::ExpEqual { scale } => Some(two * *scale * ((-a).exp() - (-b).exp())),
        }
    }
}
