//! Local-hidden-state models and the simulation protocol.
//!
//! A model is a density `omega(lambda)` over pure-qubit hidden states (unit
//! Bloch vectors) plus a response function `f(x, lambda) in [-1, 1]`; Alice
//! announces outcome `a = +-1` with probability `(1 + a f)/2`. The model
//! reproduces the assemblage of its target state iff
//!
//! ```text
//! (10a)  integral omega dlambda                 = 1
//! (10b)  integral omega f dlambda               = a . x    for all x
//! (10c)  integral omega lambda dlambda          = 0
//! (10d)  integral omega f lambda dlambda        = T x      for all x
//! ```
//!
//! Three families are provided:
//!
//! * [`werner_model`]: uniform density, `f = -q sgn(lambda . x)`, simulating
//!   `T = -q/2 * Id`.
//! * [`bell_diagonal_model`]: the stretched density
//!   `omega = 1 / (2 pi |det T0| |T0^-1 lambda|^4)` with
//!   `f = sgn(lambda' . x)`, where `lambda' = T0^-1 lambda / |T0^-1 lambda|`;
//!   exact for boundary `T0` and optimal (no model exists past the boundary).
//! * [`canonical_model`]: same density with the two-threshold response
//!   `f = q(x) sgn(lambda'. x + c) + (1 - q(x)) sgn(lambda'. x - c)`,
//!   `c = sqrt(1 - t)`, which adds a Bloch vector `a` whenever
//!   `|a . x| <= Y(T0, t, x)` for all `x` (the zone criterion).
//!
//! Requirement verification integrates in the frame of each probe direction
//! with the integration zone split at the response discontinuities, so the
//! residuals reflect the model, not quadrature artifacts of the sign
//! functions.

use crate::assemblage::{assemblage_element, operator_from_bloch, trace_distance, Measurement, Outcome};
use crate::criteria::{
    zhang_bound, zhang_criterion, CriteriaError, OptimizerConfig, DEFAULT_ORDER,
};
use crate::pauli_core::{BlochVector, CanonicalState, CorrelationDiag};
use crate::sphere_quad::{
    build_rule, fibonacci_sphere, sphere_integral, zone_integral, QuadError, QuadratureRule,
};
use nalgebra::{Complex, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use thiserror::Error;

type CMat2 = Matrix2<Complex<f64>>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LhsError {
    #[error("parameter {name} = {value} outside its admissible range")]
    ParamOutOfRange { name: &'static str, value: f64 },
    #[error("T0 is singular; degenerate correlation matrices are separable and need no model")]
    SingularT0,
    #[error("T0 is not on the unsteerable boundary (surface norm {norm:.6})")]
    BoundaryViolated { norm: f64 },
    #[error("zone criterion violated (margin {margin:.3e}); no response function exists")]
    CriterionViolated { margin: f64 },
    #[error("rejection envelope {envelope:.6} exceeded by density value {found:.6}")]
    EnvelopeInvalid { envelope: f64, found: f64 },
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Density of hidden states over the unit sphere, in 1/steradian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HiddenDensity {
    /// `1 / 4 pi`.
    Uniform,
    /// `1 / (2 pi |det T0| |T0^-1 lambda|^4)`; the image of the uniform
    /// density under the hidden-state mapping of `T0`.
    Ellipsoidal { t0: CorrelationDiag },
}

impl HiddenDensity {
    pub fn density(&self, lam: &BlochVector) -> f64 {
        match self {
            HiddenDensity::Uniform => 1.0 / (4.0 * PI),
            HiddenDensity::Ellipsoidal { t0 } => {
                let pulled = t0.apply_inverse(lam).norm();
                1.0 / (2.0 * PI * t0.det().abs() * pulled.powi(4))
            }
        }
    }

    /// Least upper bound of `4 pi * density` over the sphere, from the axis
    /// extremum of `|T0^-1 lambda|`.
    fn envelope(&self) -> f64 {
        match self {
            HiddenDensity::Uniform => 1.0,
            HiddenDensity::Ellipsoidal { t0 } => {
                2.0 * t0.abs_max().powi(4) / t0.det().abs()
            }
        }
    }
}

/// Response function families, before fixing a measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResponseFunction {
    /// `f = -q sgn(lambda . x)`.
    ScaledSign { q: f64 },
    /// `f = sgn(lambda' . x)` with `lambda' = T0^-1 lambda / |T0^-1 lambda|`.
    MappedSign { t0: CorrelationDiag },
    /// `f = q(x) sgn(lambda'. x + c) + (1 - q(x)) sgn(lambda'. x - c)` with
    /// `q(x) = (1 + (a . x) / Y(T0, 1 - c^2, x)) / 2`.
    TwoThreshold {
        t0: CorrelationDiag,
        c: f64,
        a: BlochVector,
        /// Quadrature order for the zone mass behind `q(x)`.
        order: usize,
        /// Slack allowed when `q(x)` grazes the ends of [0, 1].
        q_tolerance: f64,
    },
}

/// A response function specialized to one measurement direction.
#[derive(Debug, Clone, Copy)]
pub struct MeasurementResponse {
    /// When set, the sign argument is `lambda' . x` with
    /// `lambda' = T0^-1 lambda / |T0^-1 lambda|`; otherwise `lambda . x`.
    mapper: Option<CorrelationDiag>,
    x: BlochVector,
    kind: ResponseKind,
}

#[derive(Debug, Clone, Copy)]
enum ResponseKind {
    Sign { scale: f64 },
    TwoStep { c: f64, q: f64 },
}

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl MeasurementResponse {
    /// The sign-function argument for a hidden vector.
    fn mu(&self, lam: &BlochVector) -> f64 {
        match &self.mapper {
            None => lam.dot(&self.x),
            Some(t0) => t0
                .apply_inverse(lam)
                .normalized()
                .expect("T0^-1 lambda cannot vanish for unit lambda")
                .dot(&self.x),
        }
    }

    /// Response value as a function of the sign argument alone.
    fn eval_mu(&self, mu: f64) -> f64 {
        match self.kind {
            ResponseKind::Sign { scale } => scale * sgn(mu),
            ResponseKind::TwoStep { c, q } => q * sgn(mu + c) + (1.0 - q) * sgn(mu - c),
        }
    }

    /// `f(x, lambda)`, guaranteed in [-1, 1].
    pub fn eval(&self, lam: &BlochVector) -> f64 {
        self.eval_mu(self.mu(lam))
    }

    /// Discontinuities of the response in the sign argument.
    fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            ResponseKind::Sign { .. } => vec![0.0],
            ResponseKind::TwoStep { c, .. } => {
                if c > 0.0 {
                    vec![-c, c]
                } else {
                    vec![0.0]
                }
            }
        }
    }
}

impl ResponseFunction {
    /// Specializes the response to a measurement, computing `q(x)` for the
    /// two-threshold family.
    pub fn for_measurement(&self, x: &Measurement) -> Result<MeasurementResponse, LhsError> {
        let dir = *x.direction();
        match self {
            ResponseFunction::ScaledSign { q } => Ok(MeasurementResponse {
                mapper: None,
                x: dir,
                kind: ResponseKind::Sign { scale: -q },
            }),
            ResponseFunction::MappedSign { t0 } => Ok(MeasurementResponse {
                mapper: Some(*t0),
                x: dir,
                kind: ResponseKind::Sign { scale: 1.0 },
            }),
            ResponseFunction::TwoThreshold {
                t0,
                c,
                a,
                order,
                q_tolerance,
            } => {
                let t = 1.0 - c * c;
                let y = zhang_bound(t0, t, &dir, *order);
                let ax = a.dot(&dir);
                let q = if y.abs() < 1e-14 {
                    if ax.abs() > *q_tolerance {
                        return Err(LhsError::CriterionViolated { margin: ax.abs() });
                    }
                    0.5
                } else {
                    let q = 0.5 * (1.0 + ax / y);
                    if !(-q_tolerance..=1.0 + q_tolerance).contains(&q) {
                        return Err(LhsError::CriterionViolated {
                            margin: ax.abs() - y,
                        });
                    }
                    q.clamp(0.0, 1.0)
                };
                Ok(MeasurementResponse {
                    mapper: Some(*t0),
                    x: dir,
                    kind: ResponseKind::TwoStep { c: *c, q },
                })
            }
        }
    }
}

/// A hidden-state density, a response family, and the state the pair claims
/// to simulate.
#[derive(Debug, Clone)]
pub struct LhsModel {
    pub omega: HiddenDensity,
    pub response: ResponseFunction,
    pub target: CanonicalState,
}

fn unit_interval(name: &'static str, value: f64) -> Result<f64, LhsError> {
    if !(-1e-9..=1.0 + 1e-9).contains(&value) {
        return Err(LhsError::ParamOutOfRange { name, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// The uniform-density model for the isotropic family `T = -q/2 * Id`.
pub fn werner_model(q: f64) -> Result<LhsModel, LhsError> {
    let q = unit_interval("q", q)?;
    Ok(LhsModel {
        omega: HiddenDensity::Uniform,
        response: ResponseFunction::ScaledSign { q },
        target: CanonicalState::bell_diagonal(CorrelationDiag::isotropic(-q / 2.0)),
    })
}

/// `lambda' = T0^-1 lambda / |T0^-1 lambda|`.
pub fn map_lambda_prime(
    t0: &CorrelationDiag,
    lam: &BlochVector,
) -> Result<BlochVector, LhsError> {
    if t0.is_singular() {
        return Err(LhsError::SingularT0);
    }
    Ok(t0
        .apply_inverse(lam)
        .normalized()
        .expect("T0^-1 lambda cannot vanish for unit lambda"))
}

/// Inverse of [`map_lambda_prime`]: `lambda = T0 lambda' / |T0 lambda'|`.
pub fn map_lambda_from_prime(
    t0: &CorrelationDiag,
    lam_prime: &BlochVector,
) -> Result<BlochVector, LhsError> {
    if t0.is_singular() {
        return Err(LhsError::SingularT0);
    }
    Ok(t0
        .apply(lam_prime)
        .normalized()
        .expect("T0 lambda' cannot vanish for unit lambda' and nonsingular T0"))
}

/// The optimal model for a Bell diagonal state `T0`.
///
/// Exact when `T0` lies on the boundary; for other targets the requirement
/// residuals report the mismatch (verification decides, construction does
/// not).
pub fn bell_diagonal_model(t0: &CorrelationDiag) -> Result<LhsModel, LhsError> {
    if t0.is_singular() {
        return Err(LhsError::SingularT0);
    }
    Ok(LhsModel {
        omega: HiddenDensity::Ellipsoidal { t0: *t0 },
        response: ResponseFunction::MappedSign { t0: *t0 },
        target: CanonicalState::bell_diagonal(*t0),
    })
}

/// The two-threshold model for a canonical state `(a, t * T0)` with boundary
/// `T0`, with explicit optimizer and quadrature settings.
///
/// Construction validates the zone criterion up front: it fails with
/// [`LhsError::CriterionViolated`] exactly when no valid `q(x)` exists.
pub fn canonical_model_with(
    t0: &CorrelationDiag,
    t: f64,
    a: &BlochVector,
    qfun_tolerance: f64,
    opt: &OptimizerConfig,
    order: usize,
) -> Result<LhsModel, LhsError> {
    if t0.is_singular() {
        return Err(LhsError::SingularT0);
    }
    let t = unit_interval("t", t)?;
    let report = match zhang_criterion(a, t, t0, opt, order) {
        Ok(rep) => rep,
        Err(CriteriaError::BoundaryViolated { norm }) => {
            return Err(LhsError::BoundaryViolated { norm })
        }
        Err(e) => return Err(e.into()),
    };
    if report.margin > qfun_tolerance {
        return Err(LhsError::CriterionViolated {
            margin: report.margin,
        });
    }
    // Same renormalization the criterion applied.
    let rule = build_rule(order);
    let norm = crate::criteria::surface_norm(t0, &rule);
    let t0 = t0.scaled(1.0 / norm);
    Ok(LhsModel {
        omega: HiddenDensity::Ellipsoidal { t0 },
        response: ResponseFunction::TwoThreshold {
            t0,
            c: (1.0 - t).sqrt(),
            a: *a,
            order,
            q_tolerance: qfun_tolerance,
        },
        target: CanonicalState::new(*a, t0.scaled(t)),
    })
}

/// [`canonical_model_with`] at the default optimizer and quadrature order.
pub fn canonical_model(
    t0: &CorrelationDiag,
    t: f64,
    a: &BlochVector,
    qfun_tolerance: f64,
) -> Result<LhsModel, LhsError> {
    canonical_model_with(
        t0,
        t,
        a,
        qfun_tolerance,
        &OptimizerConfig::default(),
        DEFAULT_ORDER,
    )
}

/// Residuals of the four model requirements; the caller judges them against
/// its tolerance.
#[derive(Debug, Clone, Copy)]
pub struct RequirementReport {
    /// |integral omega - 1|.
    pub normalization: f64,
    /// max over probes of |integral omega f - a . x|.
    pub alice_marginal: f64,
    /// |integral omega lambda|.
    pub hidden_mean: f64,
    /// max over probes of |integral omega f lambda - T x|.
    pub correlation: f64,
}

impl RequirementReport {
    pub fn max_residual(&self) -> f64 {
        self.normalization
            .max(self.alice_marginal)
            .max(self.hidden_mean)
            .max(self.correlation)
    }
}

/// Scalar and vector response integrals for one probe, split at the response
/// breakpoints in the frame where they are constant-sign.
///
/// Uniform density integrates in lambda itself; the ellipsoidal density is
/// pulled back to the primed sphere, where `omega dlambda` becomes
/// `(|T0 lambda'| / 2 pi) dlambda'` and hidden vectors become
/// `T0 lambda' / |T0 lambda'|`.
fn response_integrals(
    model: &LhsModel,
    resp: &MeasurementResponse,
    order: usize,
) -> Result<(f64, BlochVector), QuadError> {
    let axis = resp.x;
    let mut cuts = vec![-1.0];
    cuts.extend(resp.breakpoints().into_iter().filter(|b| b.abs() < 1.0));
    cuts.push(1.0);

    let mut scalar = 0.0;
    let mut vector = BlochVector::zero();
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if hi - lo <= 0.0 {
            continue;
        }
        match &model.omega {
            HiddenDensity::Uniform => {
                let w = |l: &BlochVector| resp.eval_mu(l.dot(&axis)) / (4.0 * PI);
                scalar += zone_integral(w, &axis, lo, hi, order)?;
                for (i, pick) in [
                    |l: &BlochVector| l.x,
                    |l: &BlochVector| l.y,
                    |l: &BlochVector| l.z,
                ]
                .iter()
                .enumerate()
                {
                    let comp = zone_integral(
                        |l: &BlochVector| pick(l) * resp.eval_mu(l.dot(&axis)) / (4.0 * PI),
                        &axis,
                        lo,
                        hi,
                        order,
                    )?;
                    match i {
                        0 => vector.x += comp,
                        1 => vector.y += comp,
                        _ => vector.z += comp,
                    }
                }
            }
            HiddenDensity::Ellipsoidal { t0 } => {
                let w = |lp: &BlochVector| {
                    t0.apply(lp).norm() * resp.eval_mu(lp.dot(&axis)) / (2.0 * PI)
                };
                scalar += zone_integral(w, &axis, lo, hi, order)?;
                for i in 0..3 {
                    let comp = zone_integral(
                        |lp: &BlochVector| {
                            let mapped = t0.apply(lp);
                            let m = [mapped.x, mapped.y, mapped.z][i];
                            m * resp.eval_mu(lp.dot(&axis)) / (2.0 * PI)
                        },
                        &axis,
                        lo,
                        hi,
                        order,
                    )?;
                    match i {
                        0 => vector.x += comp,
                        1 => vector.y += comp,
                        _ => vector.z += comp,
                    }
                }
            }
        }
    }
    Ok((scalar, vector))
}

/// Residuals of the four requirements for `model`, using `rule` for the
/// response-independent integrals and per-probe adapted zones (at the same
/// order) for the response integrals.
pub fn verify_requirements(
    model: &LhsModel,
    rule: &QuadratureRule,
    probes: &[Measurement],
) -> Result<RequirementReport, LhsError> {
    let order = rule.order();
    let omega = |l: &BlochVector| model.omega.density(l);

    let normalization = (sphere_integral(omega, rule)? - 1.0).abs();

    let mean = BlochVector::new(
        sphere_integral(|l| omega(l) * l.x, rule)?,
        sphere_integral(|l| omega(l) * l.y, rule)?,
        sphere_integral(|l| omega(l) * l.z, rule)?,
    );
    let hidden_mean = mean.norm();

    let mut alice_marginal = 0.0_f64;
    let mut correlation = 0.0_f64;
    for x in probes {
        let resp = model.response.for_measurement(x)?;
        let (marginal, corr) = response_integrals(model, &resp, order)?;
        let target_marginal = model.target.a.dot(x.direction());
        let target_corr = model.target.t.apply(x.direction());
        alice_marginal = alice_marginal.max((marginal - target_marginal).abs());
        correlation = correlation.max(corr.sub(&target_corr).norm());
    }

    Ok(RequirementReport {
        normalization,
        alice_marginal,
        hidden_mean,
        correlation,
    })
}

/// Verifies the rejection envelope on a coarse deterministic scan;
/// fails closed if any sampled density exceeds it.
fn checked_envelope(omega: &HiddenDensity) -> Result<f64, LhsError> {
    let envelope = omega.envelope();
    for lam in fibonacci_sphere(10_000) {
        let found = 4.0 * PI * omega.density(&lam);
        if found > envelope * (1.0 + 1e-9) {
            return Err(LhsError::EnvelopeInvalid { envelope, found });
        }
    }
    Ok(envelope)
}

fn draw_uniform_sphere(rng: &mut ChaCha8Rng) -> BlochVector {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.random::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    BlochVector::new(r * phi.cos(), r * phi.sin(), z)
}

fn draw_hidden(omega: &HiddenDensity, envelope: f64, rng: &mut ChaCha8Rng) -> BlochVector {
    loop {
        let lam = draw_uniform_sphere(rng);
        if matches!(omega, HiddenDensity::Uniform) {
            return lam;
        }
        let accept = 4.0 * PI * omega.density(&lam) / envelope;
        if rng.random::<f64>() < accept {
            return lam;
        }
    }
}

/// Draws `n` hidden vectors from the model's density by rejection sampling
/// against the uniform distribution. Deterministic per seed.
pub fn sample_hidden(model: &LhsModel, seed: u64, n: usize) -> Result<Vec<BlochVector>, LhsError> {
    let envelope = checked_envelope(&model.omega)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| draw_hidden(&model.omega, envelope, &mut rng)).collect())
}

/// Frequency-weighted empirical assemblage from a protocol run.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalAssemblage {
    pub shots: u64,
    counts: [u64; 2],
    bloch_sums: [BlochVector; 2],
}

impl EmpiricalAssemblage {
    fn slot(outcome: Outcome) -> usize {
        match outcome {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    /// Empirical outcome frequency.
    pub fn probability(&self, outcome: Outcome) -> f64 {
        self.counts[Self::slot(outcome)] as f64 / self.shots as f64
    }

    /// Empirical unnormalized element `(w 1 + m.sigma)/2` with
    /// `w = count/shots` and `m = (sum of lambda)/shots`.
    pub fn element(&self, outcome: Outcome) -> CMat2 {
        let i = Self::slot(outcome);
        operator_from_bloch(
            self.counts[i] as f64 / self.shots as f64,
            &self.bloch_sums[i].scaled(1.0 / self.shots as f64),
        )
    }

    /// Trace distances from the quantum elements of `state` for both
    /// outcomes.
    pub fn distances_to_quantum(&self, state: &CanonicalState, x: &Measurement) -> [f64; 2] {
        [Outcome::Plus, Outcome::Minus].map(|o| {
            trace_distance(&self.element(o), &assemblage_element(state, x, o).op)
        })
    }
}

/// Runs the preparation protocol: draw a hidden state, announce an outcome
/// with probability `(1 + a f)/2`, hand Bob the pure state `lambda`.
/// Accumulates the outcome-conditioned unnormalized states.
pub fn simulate_protocol(
    model: &LhsModel,
    x: &Measurement,
    shots: u64,
    seed: u64,
) -> Result<EmpiricalAssemblage, LhsError> {
    if shots == 0 {
        return Err(LhsError::ParamOutOfRange {
            name: "shots",
            value: 0.0,
        });
    }
    let resp = model.response.for_measurement(x)?;
    let envelope = checked_envelope(&model.omega)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0u64; 2];
    let mut bloch_sums = [BlochVector::zero(); 2];
    for _ in 0..shots {
        let lam = draw_hidden(&model.omega, envelope, &mut rng);
        let f = resp.eval(&lam);
        let p_plus = 0.5 * (1.0 + f);
        let slot = if rng.random::<f64>() < p_plus { 0 } else { 1 };
        counts[slot] += 1;
        bloch_sums[slot] = bloch_sums[slot].add(&lam);
    }
    Ok(EmpiricalAssemblage {
        shots,
        counts,
        bloch_sums,
    })
}
