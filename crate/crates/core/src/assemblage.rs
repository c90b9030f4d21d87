//! Assemblages: the unnormalized states left on Bob's side after Alice's
//! projective measurements on a canonical state.
//!
//! For measurement direction `x` and outcome `a = ±1`,
//!
//! ```text
//! rho_{a|x} = (1/4) [ (1 + a * a_vec.x_vec) 1 + a (T x_vec).sigma ]
//! ```
//!
//! so `Tr rho_{a|x} = (1 + a * a_vec.x_vec) / 2` and the two outcomes sum to
//! Bob's reduced state 1/2 for every `x` (no signaling).

use crate::pauli_core::{dot_sigma, identity2, BlochVector, CanonicalState};
use nalgebra::{Complex, Matrix2};
use thiserror::Error;

type CMat2 = Matrix2<Complex<f64>>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblageError {
    #[error("measurement direction has norm {norm}; must be unit")]
    NonUnitDirection { norm: f64 },
}

/// A projective measurement direction on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    dir: BlochVector,
}

impl Measurement {
    pub fn new(dir: BlochVector) -> Result<Self, AssemblageError> {
        if !dir.is_finite() || !dir.is_unit(1e-12) {
            return Err(AssemblageError::NonUnitDirection { norm: dir.norm() });
        }
        Ok(Self { dir })
    }

    /// Normalizes a nonzero vector into a measurement direction.
    pub fn from_vector(v: BlochVector) -> Result<Self, AssemblageError> {
        v.normalized()
            .map(|dir| Self { dir })
            .ok_or(AssemblageError::NonUnitDirection { norm: v.norm() })
    }

    pub fn direction(&self) -> &BlochVector {
        &self.dir
    }
}

/// Alice's outcome, `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(&self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }
}

/// One unnormalized post-measurement operator together with its label.
#[derive(Debug, Clone)]
pub struct AssemblageElement {
    pub outcome: Outcome,
    pub op: CMat2,
}

impl AssemblageElement {
    /// Alice's outcome probability `P_A(a|x) = Tr rho_{a|x}`.
    pub fn probability(&self) -> f64 {
        self.op.trace().re
    }

    /// The normalized conditional state, when the probability is nonzero.
    pub fn normalized(&self) -> Option<CMat2> {
        let p = self.probability();
        if p <= 0.0 {
            None
        } else {
            Some(self.op.scale(1.0 / p))
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.op + self.op.adjoint()).scale(0.5);
        h.symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Bob's unnormalized conditional state for measurement `x` and outcome `a`.
pub fn assemblage_element(
    state: &CanonicalState,
    x: &Measurement,
    outcome: Outcome,
) -> AssemblageElement {
    let a = outcome.sign();
    let bias = 1.0 + a * state.a.dot(x.direction());
    let corr = state.t.apply(x.direction()).scaled(a);
    let op = (identity2().scale(bias) + dot_sigma(&corr)).scale(0.25);
    AssemblageElement { outcome, op }
}

/// Builds a 2x2 operator `(w 1 + m.sigma)/2` from a weight and Bloch part.
pub fn operator_from_bloch(weight: f64, m: &BlochVector) -> CMat2 {
    (identity2().scale(weight) + dot_sigma(m)).scale(0.5)
}

/// Trace distance `(1/2) || A - B ||_1` between 2x2 Hermitian operators.
pub fn trace_distance(a: &CMat2, b: &CMat2) -> f64 {
    let h = ((a - b) + (a - b).adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    0.5 * eig.eigenvalues.iter().map(|e| e.abs()).sum::<f64>()
}

/// Largest entrywise deviation of `sum_a rho_{a|x}` from Bob's reduced state
/// over the given measurement directions.
pub fn no_signaling_residual(state: &CanonicalState, directions: &[Measurement]) -> f64 {
    let rho_b = identity2().scale(0.5);
    directions
        .iter()
        .map(|x| {
            let total = Outcome::BOTH
                .iter()
                .map(|a| assemblage_element(state, x, *a).op)
                .sum::<CMat2>();
            (total - rho_b)
                .iter()
                .map(|e| e.norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}
