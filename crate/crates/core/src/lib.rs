//! Numerical toolkit for EPR steering of two-qubit states.
//!
//! The crate decides steerability of Bell diagonal states exactly, constructs
//! explicit local-hidden-state (LHS) models for the states that admit one, and
//! evaluates two sufficient unsteerability criteria for canonical states
//! (a single Bloch vector on Alice's side, diagonal spin correlation matrix).
//!
//! Modules follow the pipeline:
//!
//! * [`pauli_core`] — Bloch/Pauli algebra, state reconstruction, physicality.
//! * [`sphere_quad`] — deterministic quadrature over the sphere, caps and zones.
//! * [`assemblage`] — post-measurement ensembles from projective measurements.
//! * [`criteria`] — steerable boundary, the two criteria, Bloch-length solvers.
//! * [`lhs_models`] — the Werner, Bell-diagonal and canonical LHS models,
//!   requirement verification, and Monte Carlo simulation of the LHS protocol.

pub mod assemblage;
pub mod criteria;
pub mod lhs_models;
pub mod pauli_core;
pub mod sphere_quad;

pub use assemblage::{assemblage_element, no_signaling_residual, Measurement, Outcome};
pub use criteria::{
    bowles_criterion, classify, critical_scaling, is_steerable_bell_diagonal,
    max_bloch_under_criterion, surface_norm, zhang_criterion, CriterionKind, OptimizerConfig,
    Verdict,
};
pub use lhs_models::{
    bell_diagonal_model, canonical_model, simulate_protocol, verify_requirements, werner_model,
    LhsModel,
};
pub use pauli_core::{BlochVector, CanonicalState, CorrelationDiag, DensityMatrix4};
pub use sphere_quad::{build_rule, sphere_integral, QuadratureRule};
