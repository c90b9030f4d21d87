//! Steerability boundary and unsteerability criteria.
//!
//! For Bell diagonal states the boundary is exact: `T` is unsteerable from
//! Alice to Bob iff `(1/2pi) * integral |T lambda| dlambda <= 1`
//! ([`surface_norm`], [`is_steerable_bell_diagonal`]). A boundary matrix `T0`
//! labels the ray `T = t T0`; `t` is the visibility.
//!
//! For canonical states with Bloch vector `a` two sufficient unsteerability
//! criteria are provided, both of the form
//! `max_x [ (a.x)^2 - B(T0, t, x)^2 ] <= 0`:
//!
//! * Bowles-type bound `B = X(T0, t, x) = sqrt(1 - 2 t |T0 x|)`
//!   ([`bowles_criterion`]); a negative radicand means no Bloch vector is
//!   admitted in that direction.
//! * Zone bound `B = Y(T0, t, x)`: the mass `(1/2pi) |T0 lambda|` carried by
//!   the symmetric zone `|lambda . x| < sqrt(1 - t)` of the unit sphere
//!   ([`zhang_criterion`]). For boundary `T0` the full-sphere mass is 1, so
//!   `Y(T0, 0, x) = 1` and `Y` decreases monotonically to 0 at `t = 1`.
//!
//! Each satisfied zone criterion corresponds to an explicit LHS model (built
//! in `lhs_models`); the two are a single statement and are cross-verified in
//! the test suites.

use crate::pauli_core::{max_bloch_psd, BlochVector, CanonicalState, CorrelationDiag};
use crate::sphere_quad::{
    build_rule, fibonacci_sphere, sphere_integral, zone_integral, QuadratureRule,
};
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

/// Default quadrature order for boundary and zone integrals.
pub const DEFAULT_ORDER: usize = 64;

/// Verdict threshold for the criterion reports.
pub const CRITERION_TOLERANCE: f64 = 1e-9;

/// Satisfied/violated threshold used inside Bloch-length bisections. Tighter
/// than the report threshold so that degenerate maxima (margin tangent to
/// zero) cost at most sqrt(eps) ~ 3e-7 in the returned length.
const BISECT_EPS: f64 = 1e-13;

/// Boundary-membership tolerance on the surface norm.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriteriaError {
    #[error("correlation matrix is singular")]
    SingularT,
    #[error("T0 is not on the unsteerable boundary (surface norm {norm:.6})")]
    BoundaryViolated { norm: f64 },
    #[error("parameter {name} = {value} outside its admissible range")]
    ParamOutOfRange { name: &'static str, value: f64 },
    #[error("criterion admits no Bloch vector, not even a = 0 (margin {margin:.3e})")]
    NoBlochVectorAllowed { margin: f64 },
    #[error("derivative check undefined: {0}")]
    DomainError(String),
    #[error(transparent)]
    Quad(#[from] crate::sphere_quad::QuadError),
}

/// Which sufficient unsteerability criterion an object refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionKind {
    Bowles,
    Zhang,
}

impl CriterionKind {
    pub fn id(&self) -> &'static str {
        match self {
            CriterionKind::Bowles => "bowles",
            CriterionKind::Zhang => "zhang",
        }
    }
}

/// Outcome of evaluating one criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub kind: CriterionKind,
    /// `margin <= CRITERION_TOLERANCE`.
    pub satisfied: bool,
    /// Maximizing measurement direction.
    pub witness: BlochVector,
    /// Maximum of the criterion objective; nonpositive means unsteerable.
    pub margin: f64,
}

/// Critical point of the ray `t * T_dir`.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryResult {
    pub t_star: f64,
    pub t_critical: CorrelationDiag,
}

/// Steerability decision for a Bell diagonal state.
#[derive(Debug, Clone, Copy)]
pub struct SteerabilityVerdict {
    pub steerable: bool,
    /// `surface_norm - 1`; only meaningful for nondegenerate `T`.
    pub margin: f64,
}

/// Settings for [`max_on_sphere`] and the criterion maximizations.
#[derive(Debug, Clone, Copy)]
pub struct OptimizerConfig {
    /// Coarse Fibonacci-lattice size.
    pub grid_points: usize,
    /// Candidates per refinement ring.
    pub ring_points: usize,
    /// Refinement stops when the ring radius drops below this.
    pub min_step: f64,
    /// Cap on refinement iterations (safety, never reached in practice).
    pub max_iterations: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_points: 4096,
            ring_points: 16,
            min_step: 1e-7,
            max_iterations: 10_000,
        }
    }
}

impl OptimizerConfig {
    /// Reduced budget for inner loops of sweeps and tests.
    pub fn fast() -> Self {
        Self {
            grid_points: 1024,
            ..Self::default()
        }
    }

    fn initial_radius(&self) -> f64 {
        2.0 * (4.0 * PI / self.grid_points as f64).sqrt()
    }
}

/// `(1/2pi) * integral |T lambda| dlambda`; equals 1 exactly on the
/// unsteerable boundary for Bell diagonal states.
pub fn surface_norm(t: &CorrelationDiag, rule: &QuadratureRule) -> f64 {
    sphere_integral(|l| t.apply(l).norm(), rule).expect("norm integrand is finite") / (2.0 * PI)
}

/// Scales `T_dir` onto the boundary: `t_star * T_dir` is critical.
pub fn critical_scaling(
    t_dir: &CorrelationDiag,
    rule: &QuadratureRule,
) -> Result<BoundaryResult, CriteriaError> {
    if t_dir.is_singular() {
        return Err(CriteriaError::SingularT);
    }
    let norm = surface_norm(t_dir, rule);
    let t_star = 1.0 / norm;
    Ok(BoundaryResult {
        t_star,
        t_critical: t_dir.scaled(t_star),
    })
}

/// Exact steerability decision for Bell diagonal states (`a = 0`).
///
/// Degenerate `T` is separable, hence unsteerable, regardless of the margin.
pub fn is_steerable_bell_diagonal(
    t: &CorrelationDiag,
    rule: &QuadratureRule,
) -> SteerabilityVerdict {
    let margin = surface_norm(t, rule) - 1.0;
    let steerable = !t.is_singular() && margin > CRITERION_TOLERANCE;
    SteerabilityVerdict { steerable, margin }
}

/// Renormalizes a near-boundary matrix onto the boundary, rejecting inputs
/// farther than 1e-3 away.
pub fn boundary_normalized(
    t0: &CorrelationDiag,
    rule: &QuadratureRule,
) -> Result<CorrelationDiag, CriteriaError> {
    let norm = surface_norm(t0, rule);
    if (norm - 1.0).abs() > 1e-3 {
        return Err(CriteriaError::BoundaryViolated { norm });
    }
    Ok(t0.scaled(1.0 / norm))
}

fn unit_interval(name: &'static str, value: f64) -> Result<f64, CriteriaError> {
    if !(-1e-9..=1.0 + 1e-9).contains(&value) {
        return Err(CriteriaError::ParamOutOfRange { name, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Per-direction Bloch bound of the Bowles-type criterion,
/// `X = sqrt(1 - 2 t |T0 x|)`; `None` when the radicand is negative.
pub fn bowles_bound(t0: &CorrelationDiag, t: f64, x: &BlochVector) -> Option<f64> {
    let radicand = 1.0 - 2.0 * t * t0.apply(x).norm();
    if radicand < 0.0 {
        None
    } else {
        Some(radicand.sqrt())
    }
}

/// Per-direction Bloch bound of the zone criterion: the correlation mass
/// `(1/2pi) |T0 lambda|` carried by the zone `|lambda . x| < sqrt(1 - t)`.
pub fn zhang_bound(t0: &CorrelationDiag, t: f64, x: &BlochVector, order: usize) -> f64 {
    let c = (1.0 - t).max(0.0).sqrt();
    zone_integral(|l| t0.apply(l).norm() / (2.0 * PI), x, -c, c, order)
        .expect("zone integrand is finite for unit x")
}

/// Squared per-direction bound of a criterion objective. For the Bowles
/// criterion this is the (possibly negative) radicand itself, so a negative
/// value feeds straight into the objective as a violation.
fn bound_sq(
    kind: CriterionKind,
    t0: &CorrelationDiag,
    t: f64,
    x: &BlochVector,
    order: usize,
) -> f64 {
    match kind {
        CriterionKind::Bowles => 1.0 - 2.0 * t * t0.apply(x).norm(),
        CriterionKind::Zhang => {
            let y = zhang_bound(t0, t, x, order);
            y * y
        }
    }
}

/// Ring-shrinking local refinement on the sphere starting from `best`.
fn refine_on_sphere<F>(
    obj: &F,
    mut best: BlochVector,
    mut value: f64,
    radius: f64,
    opt: &OptimizerConfig,
) -> (BlochVector, f64)
where
    F: Fn(&BlochVector) -> f64,
{
    let mut r = radius;
    let mut iterations = 0;
    while r > opt.min_step && iterations < opt.max_iterations {
        iterations += 1;
        let (u, v) = crate::sphere_quad::frame_from_axis(&best);
        let mut improved = false;
        for k in 0..opt.ring_points {
            let ang = 2.0 * PI * k as f64 / opt.ring_points as f64;
            let cand = best
                .add(&u.scaled(r * ang.cos()))
                .add(&v.scaled(r * ang.sin()))
                .normalized()
                .expect("ring candidate cannot vanish");
            let cv = obj(&cand);
            if cv > value {
                value = cv;
                best = cand;
                improved = true;
            }
        }
        if !improved {
            r *= 0.5;
        }
    }
    (best, value)
}

/// Global maximum of `obj` over the unit sphere: coarse Fibonacci-lattice
/// pass followed by ring-shrinking refinement. Deterministic.
pub fn max_on_sphere<F>(obj: F, opt: &OptimizerConfig) -> (BlochVector, f64)
where
    F: Fn(&BlochVector) -> f64,
{
    let lattice = fibonacci_sphere(opt.grid_points);
    let mut best = lattice[0];
    let mut value = f64::NEG_INFINITY;
    for x in &lattice {
        let v = obj(x);
        if v > value {
            value = v;
            best = *x;
        }
    }
    refine_on_sphere(&obj, best, value, opt.initial_radius(), opt)
}

/// Bowles-type sufficient unsteerability criterion:
/// `max_x [ (a.x)^2 - (1 - 2 t |T0 x|) ] <= 0`.
///
/// Directions with negative radicand contribute a positive objective, so
/// they count as violations automatically.
pub fn bowles_criterion(
    a: &BlochVector,
    t: f64,
    t0: &CorrelationDiag,
    opt: &OptimizerConfig,
) -> Result<CriterionReport, CriteriaError> {
    let t = unit_interval("t", t)?;
    let obj = |x: &BlochVector| {
        let ax = a.dot(x);
        ax * ax - (1.0 - 2.0 * t * t0.apply(x).norm())
    };
    let (witness, margin) = max_on_sphere(obj, opt);
    Ok(CriterionReport {
        kind: CriterionKind::Bowles,
        satisfied: margin <= CRITERION_TOLERANCE,
        witness,
        margin,
    })
}

/// Zone-bound sufficient unsteerability criterion:
/// `max_x [ (a.x)^2 - Y(T0, t, x)^2 ] <= 0` for boundary `T0`.
///
/// Whenever this criterion is satisfied, the corresponding canonical LHS
/// model exists (`lhs_models::canonical_model`) and reproduces the state.
pub fn zhang_criterion(
    a: &BlochVector,
    t: f64,
    t0: &CorrelationDiag,
    opt: &OptimizerConfig,
    order: usize,
) -> Result<CriterionReport, CriteriaError> {
    let t = unit_interval("t", t)?;
    let rule = build_rule(order);
    let t0 = boundary_normalized(t0, &rule)?;
    let obj = |x: &BlochVector| {
        let ax = a.dot(x);
        let y = zhang_bound(&t0, t, x, order);
        ax * ax - y * y
    };
    let (witness, margin) = max_on_sphere(obj, opt);
    Ok(CriterionReport {
        kind: CriterionKind::Zhang,
        satisfied: margin <= CRITERION_TOLERANCE,
        witness,
        margin,
    })
}

/// Criterion margin at Bloch length `s` along `dir`, sharing a precomputed
/// table of squared bounds on the lattice. Coarse maxima are lower bounds on
/// the true margin, so a positive coarse margin short-circuits refinement.
struct MarginEvaluator<'a> {
    kind: CriterionKind,
    t0: CorrelationDiag,
    t: f64,
    dir: BlochVector,
    order: usize,
    opt: &'a OptimizerConfig,
    lattice: Vec<BlochVector>,
    bound2: Vec<f64>,
    dir_dot: Vec<f64>,
}

impl<'a> MarginEvaluator<'a> {
    fn new(
        kind: CriterionKind,
        t0: CorrelationDiag,
        t: f64,
        dir: BlochVector,
        opt: &'a OptimizerConfig,
        order: usize,
    ) -> Self {
        let lattice = fibonacci_sphere(opt.grid_points);
        let bound2: Vec<f64> = lattice
            .par_iter()
            .map(|x| bound_sq(kind, &t0, t, x, order))
            .collect();
        let dir_dot = lattice.iter().map(|x| dir.dot(x)).collect();
        Self {
            kind,
            t0,
            t,
            dir,
            order,
            opt,
            lattice,
            bound2,
            dir_dot,
        }
    }

    fn margin(&self, s: f64) -> f64 {
        let mut best_i = 0;
        let mut coarse = f64::NEG_INFINITY;
        for i in 0..self.lattice.len() {
            let ax = s * self.dir_dot[i];
            let v = ax * ax - self.bound2[i];
            if v > coarse {
                coarse = v;
                best_i = i;
            }
        }
        if coarse > BISECT_EPS {
            return coarse;
        }
        let obj = |x: &BlochVector| {
            let ax = s * self.dir.dot(x);
            ax * ax - bound_sq(self.kind, &self.t0, self.t, x, self.order)
        };
        refine_on_sphere(
            &obj,
            self.lattice[best_i],
            coarse,
            self.opt.initial_radius(),
            self.opt,
        )
        .1
    }
}

/// Largest Bloch length `s` along `dir` for which the criterion holds for
/// `a = s dir`, found by bisection to 1e-6. Both objectives are monotone
/// nondecreasing in `s` at fixed `x`, so the satisfied set is an interval.
pub fn max_bloch_under_criterion(
    kind: CriterionKind,
    t0: &CorrelationDiag,
    t: f64,
    dir: &BlochVector,
    opt: &OptimizerConfig,
    order: usize,
) -> Result<f64, CriteriaError> {
    let t = unit_interval("t", t)?;
    debug_assert!(dir.is_unit(1e-12));
    let t0 = match kind {
        CriterionKind::Bowles => *t0,
        CriterionKind::Zhang => boundary_normalized(t0, &build_rule(order))?,
    };
    let eval = MarginEvaluator::new(kind, t0, t, *dir, opt, order);
    let at_origin = eval.margin(0.0);
    if at_origin > BISECT_EPS {
        return Err(CriteriaError::NoBlochVectorAllowed { margin: at_origin });
    }
    if eval.margin(1.0) <= BISECT_EPS {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if eval.margin(mid) <= BISECT_EPS {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Checks that along the largest-|component| axis the zone criterion admits
/// at least the Bloch length of the Bowles-type criterion.
///
/// When the Bowles bound excludes every Bloch vector (2 t max|T0,i| > 1) the
/// comparison is vacuous and the check passes.
pub fn case1_dominance_check(
    t0: &CorrelationDiag,
    t: f64,
    opt: &OptimizerConfig,
    order: usize,
) -> Result<bool, CriteriaError> {
    let sorted = {
        let [x, y, z] = t0.abs_sorted();
        CorrelationDiag::new(x, y, z)
    };
    let dir = BlochVector::e_z();
    let zhang = max_bloch_under_criterion(CriterionKind::Zhang, &sorted, t, &dir, opt, order)?;
    let bowles =
        match max_bloch_under_criterion(CriterionKind::Bowles, &sorted, t, &dir, opt, order) {
            Ok(v) => v,
            Err(CriteriaError::NoBlochVectorAllowed { .. }) => return Ok(true),
            Err(e) => return Err(e),
        };
    Ok(zhang >= bowles - 1e-6)
}

/// Partial derivatives in `t` of the two per-direction bounds along the
/// largest-|component| axis.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeReport {
    /// `dX/dt = -|T0,z| / sqrt(1 - 2 t |T0,z|)`, analytic.
    pub x_rate: f64,
    /// Central finite difference of [`zhang_bound`].
    pub y_rate_fd: f64,
    /// Closed-form zone-boundary integral for `dY/dt`.
    pub y_rate_closed: f64,
    /// `x_rate <= y_rate <= 0`.
    pub chain_holds: bool,
    /// |finite difference - closed form|.
    pub fd_vs_closed: f64,
}

/// Verifies, for a boundary `T0` ordered `|T0,x| <= |T0,y| <= |T0,z|`, the
/// derivative chain `dX/dt <= dY/dt <= 0` at the largest axis, computing
/// `dY/dt` both by central finite differences and by the closed-form
/// boundary integral
/// `-(1/(2 pi sqrt(1-t))) * integral sqrt(T0z^2 (1-t) + (T0x^2 cos^2 phi +
/// T0y^2 sin^2 phi) t) dphi`.
pub fn appendix_derivative_check(
    t0: &CorrelationDiag,
    t: f64,
    h: f64,
    order: usize,
) -> Result<DerivativeReport, CriteriaError> {
    if h <= 0.0 || t - h <= 0.0 || t + h >= 1.0 {
        return Err(CriteriaError::DomainError(format!(
            "need 0 < t-h and t+h < 1; got t = {t}, h = {h}"
        )));
    }
    let rule = build_rule(order);
    let t0 = boundary_normalized(t0, &rule)?;
    let [ax, ay, az] = t0.abs_sorted();
    if 2.0 * (t + h) * az >= 1.0 {
        return Err(CriteriaError::DomainError(format!(
            "X undefined: 2 (t+h) |T0,z| = {} >= 1",
            2.0 * (t + h) * az
        )));
    }
    let sorted = CorrelationDiag::new(ax, ay, az);
    let k = BlochVector::e_z();

    let x_rate = -az / (1.0 - 2.0 * t * az).sqrt();

    let y_plus = zhang_bound(&sorted, t + h, &k, order);
    let y_minus = zhang_bound(&sorted, t - h, &k, order);
    let y_rate_fd = (y_plus - y_minus) / (2.0 * h);

    // Periodic trapezoid; the integrand is smooth in phi.
    let n_phi = 512;
    let mut boundary_avg = 0.0;
    for j in 0..n_phi {
        let phi = 2.0 * PI * j as f64 / n_phi as f64;
        let radial = az * az * (1.0 - t)
            + (ax * ax * phi.cos().powi(2) + ay * ay * phi.sin().powi(2)) * t;
        boundary_avg += radial.sqrt();
    }
    boundary_avg /= n_phi as f64;
    let y_rate_closed = -boundary_avg / (1.0 - t).sqrt();

    let chain_holds = x_rate <= y_rate_closed + 1e-9 && y_rate_closed <= 1e-12;
    Ok(DerivativeReport {
        x_rate,
        y_rate_fd,
        y_rate_closed,
        chain_holds,
        fd_vs_closed: (y_rate_fd - y_rate_closed).abs(),
    })
}

/// Axial family for the maximal-Bloch-length sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Panel {
    /// `|Tz| <= |Tx| = |Ty| = 1/2`, Bloch vector along z; abscissa `|Tz|`.
    A,
    /// `|Tx| = |Ty| <= |Tz| = 1/2`, Bloch vector along x; abscissa `|Tx|`.
    B,
}

/// One abscissa of a panel sweep.
#[derive(Debug, Clone, Copy)]
pub struct Figure1Row {
    pub abscissa: f64,
    pub amax_bowles: f64,
    pub amax_zhang: f64,
    pub amax_psd: f64,
}

/// Maximal Bloch lengths along the panel axis for both criteria, plus the
/// physicality (positive-semidefiniteness) cap, on a uniform abscissa grid
/// over (0, 1/2].
pub fn figure1_data(
    panel: Panel,
    samples: usize,
    opt: &OptimizerConfig,
    order: usize,
) -> Result<Vec<Figure1Row>, CriteriaError> {
    if samples < 2 {
        return Err(CriteriaError::ParamOutOfRange {
            name: "samples",
            value: samples as f64,
        });
    }
    let rule = build_rule(order);
    let abscissae: Vec<f64> = (1..=samples)
        .map(|i| 0.5 * i as f64 / samples as f64)
        .collect();
    abscissae
        .par_iter()
        .map(|&q| {
            let (state_t, dir) = match panel {
                Panel::A => (CorrelationDiag::new(-0.5, -0.5, -q), BlochVector::e_z()),
                Panel::B => (CorrelationDiag::new(-q, -q, -0.5), BlochVector::e_x()),
            };
            // The state itself fixes the ray: t is its surface norm and T0
            // the boundary matrix in the same direction.
            let t = surface_norm(&state_t, &rule).min(1.0);
            let t0 = state_t.scaled(1.0 / t);
            let amax = |kind| match max_bloch_under_criterion(kind, &t0, t, &dir, opt, order) {
                Ok(v) => Ok(v),
                Err(CriteriaError::NoBlochVectorAllowed { .. }) => Ok(0.0),
                Err(e) => Err(e),
            };
            let amax_bowles = amax(CriterionKind::Bowles)?;
            let amax_zhang = amax(CriterionKind::Zhang)?;
            let amax_psd =
                max_bloch_psd(&state_t, &dir).expect("panel states are physical at a = 0");
            Ok(Figure1Row {
                abscissa: q,
                amax_bowles,
                amax_zhang,
                amax_psd,
            })
        })
        .collect()
}

/// Abscissa where the zone criterion stops dominating the Bowles-type one:
/// the first sign change of `amax_zhang - amax_bowles`, linearly
/// interpolated. Sign changes below 1e-5 on both sides are ignored as noise.
pub fn crossover_abscissa(rows: &[Figure1Row]) -> Option<f64> {
    for pair in rows.windows(2) {
        let d0 = pair[0].amax_zhang - pair[0].amax_bowles;
        let d1 = pair[1].amax_zhang - pair[1].amax_bowles;
        if d0 > 0.0 && d1 <= 0.0 && d0.abs().max(d1.abs()) > 1e-5 {
            let frac = d0 / (d0 - d1);
            return Some(pair[0].abscissa + frac * (pair[1].abscissa - pair[0].abscissa));
        }
    }
    None
}

/// Classification verdicts, in decision order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SeparableBellDiagonal,
    SteerableAtoB,
    UnsteerableCertified,
    Undetermined,
}

impl Verdict {
    pub fn id(&self) -> &'static str {
        match self {
            Verdict::SeparableBellDiagonal => "separable_bell_diagonal",
            Verdict::SteerableAtoB => "steerable_a_to_b",
            Verdict::UnsteerableCertified => "unsteerable_certified",
            Verdict::Undetermined => "undetermined",
        }
    }
}

/// Parameters of the certifying LHS model for a zone-criterion certificate.
#[derive(Debug, Clone, Copy)]
pub struct ModelParameters {
    pub t0: CorrelationDiag,
    pub t: f64,
    pub c: f64,
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub criterion: CriterionKind,
    pub model: Option<ModelParameters>,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyConfig {
    pub order: usize,
    pub opt: OptimizerConfig,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            opt: OptimizerConfig::default(),
        }
    }
}

/// Full classification report; margins are kept for every test that ran.
#[derive(Debug, Clone)]
pub struct ClassifyReport {
    pub verdict: Verdict,
    pub bell_diagonal: bool,
    pub octahedron_sum: f64,
    pub degenerate: bool,
    /// Surface norm of the state's correlation matrix (its visibility).
    pub visibility: f64,
    pub bowles: Option<CriterionReport>,
    pub zhang: Option<CriterionReport>,
    pub certificate: Option<Certificate>,
}

/// Decides a canonical state, in order: separable Bell diagonal, steerable
/// Bell diagonal, certified unsteerable (first satisfied criterion wins,
/// Bowles-type checked first), undetermined.
pub fn classify(
    state: &CanonicalState,
    config: &ClassifyConfig,
) -> Result<ClassifyReport, CriteriaError> {
    let rule = build_rule(config.order);
    let bell_diagonal = state.is_bell_diagonal();
    let octahedron_sum = state.t.abs_sum();
    let degenerate = state.t.is_singular();
    let visibility = surface_norm(&state.t, &rule);

    let mut report = ClassifyReport {
        verdict: Verdict::Undetermined,
        bell_diagonal,
        octahedron_sum,
        degenerate,
        visibility,
        bowles: None,
        zhang: None,
        certificate: None,
    };

    if bell_diagonal {
        if crate::pauli_core::bell_diagonal_separable(&state.t) || degenerate {
            report.verdict = Verdict::SeparableBellDiagonal;
            return Ok(report);
        }
        if visibility > 1.0 + CRITERION_TOLERANCE {
            report.verdict = Verdict::SteerableAtoB;
            return Ok(report);
        }
    }

    // Criterion phase. The visibility splits T = t * T0 with T0 on the
    // boundary; beyond the boundary no criterion can certify anything.
    let t = visibility.min(1.0);
    let (t0, zero_t) = if visibility > 1e-12 {
        (state.t.scaled(1.0 / visibility), false)
    } else {
        // T = 0: any boundary direction represents the (trivial) ray.
        (CorrelationDiag::isotropic(0.5), true)
    };

    if visibility <= 1.0 + 1e-9 || zero_t {
        let bowles = bowles_criterion(&state.a, t, &t0, &config.opt)?;
        let bowles_ok = bowles.satisfied;
        report.bowles = Some(bowles);
        if bowles_ok {
            report.verdict = Verdict::UnsteerableCertified;
            report.certificate = Some(Certificate {
                criterion: CriterionKind::Bowles,
                model: None,
            });
            return Ok(report);
        }
        if !t0.is_singular() {
            let zhang = zhang_criterion(&state.a, t, &t0, &config.opt, config.order)?;
            let zhang_ok = zhang.satisfied;
            report.zhang = Some(zhang);
            if zhang_ok {
                report.verdict = Verdict::UnsteerableCertified;
                report.certificate = Some(Certificate {
                    criterion: CriterionKind::Zhang,
                    model: Some(ModelParameters {
                        t0,
                        t,
                        c: (1.0 - t).max(0.0).sqrt(),
                    }),
                });
                return Ok(report);
            }
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rule64() -> QuadratureRule {
        build_rule(64)
    }

    fn random_boundary_t0(rng: &mut ChaCha8Rng, rule: &QuadratureRule) -> CorrelationDiag {
        loop {
            let d = CorrelationDiag::new(
                (rng.random::<f64>() - 0.5) * 2.0,
                (rng.random::<f64>() - 0.5) * 2.0,
                (rng.random::<f64>() - 0.5) * 2.0,
            );
            if d.abs_sorted()[0] > 0.15 {
                return critical_scaling(&d, rule).unwrap().t_critical;
            }
        }
    }

    /// Zone mass along z for axially symmetric T0 (|T0x| = |T0y|), via the
    /// elementary antiderivative of sqrt(a^2 +/- b^2 z^2).
    fn axial_zone_mass_z(t0x: f64, t0z: f64, t: f64) -> f64 {
        let c = (1.0 - t).max(0.0).sqrt();
        let a = t0x.abs();
        let d = t0z * t0z - t0x * t0x;
        if d.abs() < 1e-14 {
            return 2.0 * c * a;
        }
        if d > 0.0 {
            let b = d.sqrt();
            c * (a * a + b * b * c * c).sqrt() + (a * a / b) * (b * c / a).asinh()
        } else {
            let b = (-d).sqrt();
            c * (a * a - b * b * c * c).sqrt() + (a * a / b) * (b * c / a).asin()
        }
    }

    #[test]
    fn surface_norm_reference_values() {
        let rule = rule64();
        assert_abs_diff_eq!(
            surface_norm(&CorrelationDiag::isotropic(-0.5), &rule),
            1.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            surface_norm(&CorrelationDiag::isotropic(-1.0), &rule),
            2.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            surface_norm(&CorrelationDiag::new(0.5, 0.5, -0.5), &rule),
            1.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn critical_scaling_reference_values() {
        let rule = rule64();
        let res = critical_scaling(&CorrelationDiag::isotropic(-1.0), &rule).unwrap();
        assert_abs_diff_eq!(res.t_star, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(surface_norm(&res.t_critical, &rule), 1.0, epsilon = 1e-9);

        let res = critical_scaling(&CorrelationDiag::new(1.0, 1.0, -1.0), &rule).unwrap();
        assert_abs_diff_eq!(res.t_star, 0.5, epsilon = 1e-6);

        let res = critical_scaling(&CorrelationDiag::isotropic(-0.5), &rule).unwrap();
        assert_abs_diff_eq!(res.t_star, 1.0, epsilon = 1e-6);

        assert!(matches!(
            critical_scaling(&CorrelationDiag::new(1.0, 1.0, 0.0), &rule),
            Err(CriteriaError::SingularT)
        ));
    }

    #[test]
    fn critical_scaling_homogeneity() {
        let rule = rule64();
        let base = CorrelationDiag::new(0.7, -0.5, 0.3);
        let t_base = critical_scaling(&base, &rule).unwrap().t_star;
        for s in [0.5, 2.0] {
            let t_scaled = critical_scaling(&base.scaled(s), &rule).unwrap().t_star;
            assert_abs_diff_eq!(t_scaled * s, t_base, epsilon = 1e-9);
        }
    }

    #[test]
    fn steerability_decision() {
        let rule = rule64();
        assert!(is_steerable_bell_diagonal(&CorrelationDiag::isotropic(-0.8), &rule).steerable);
        assert!(!is_steerable_bell_diagonal(&CorrelationDiag::isotropic(-0.4), &rule).steerable);
        // Degenerate T is separable even when its surface norm exceeds 1.
        let degenerate = CorrelationDiag::new(1.0, 1.0, 0.0);
        let verdict = is_steerable_bell_diagonal(&degenerate, &rule);
        assert!(verdict.margin > 0.0);
        assert!(!verdict.steerable);
        assert!(!is_steerable_bell_diagonal(&CorrelationDiag::new(0.9, 0.1, 0.0), &rule).steerable);
    }

    #[test]
    fn bowles_bound_values() {
        let iso = CorrelationDiag::isotropic(0.5);
        assert_abs_diff_eq!(
            bowles_bound(&iso, 0.0, &BlochVector::e_z()).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            bowles_bound(&iso, 1.0, &BlochVector::e_z()).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        let aniso = CorrelationDiag::new(0.3, 0.3, 0.6);
        assert!(bowles_bound(&aniso, 1.0, &BlochVector::e_z()).is_none());
    }

    #[test]
    fn zhang_bound_band_limits() {
        let rule = rule64();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..5 {
            let t0 = random_boundary_t0(&mut rng, &rule);
            // Full sphere at t = 0 recovers the boundary normalization.
            assert_abs_diff_eq!(
                zhang_bound(&t0, 0.0, &BlochVector::e_x(), 64),
                1.0,
                epsilon = 1e-6
            );
            // Empty zone at t = 1.
            assert_eq!(zhang_bound(&t0, 1.0, &BlochVector::e_z(), 64), 0.0);
        }
    }

    #[test]
    fn zhang_bound_isotropic_closed_form() {
        let iso = CorrelationDiag::isotropic(0.5);
        for t in [0.0f64, 0.25, 0.5, 0.75, 0.9] {
            let expected = (1.0 - t).sqrt();
            for x in [BlochVector::e_x(), BlochVector::e_z()] {
                assert_abs_diff_eq!(zhang_bound(&iso, t, &x, 64), expected, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn zhang_bound_axial_closed_form() {
        // Axially symmetric boundary matrices, zone along z: compare the
        // quadrature against the elementary antiderivative.
        let rule = rule64();
        for xi in [0.1, 0.25, 0.4, 0.45] {
            let dir = CorrelationDiag::new(-xi, -xi, -0.5);
            let t0 = critical_scaling(&dir, &rule).unwrap().t_critical;
            for t in [0.2, 0.5, 0.8] {
                let got = zhang_bound(&t0, t, &BlochVector::e_z(), 64);
                let expected = axial_zone_mass_z(t0.tx, t0.tz, t);
                assert_abs_diff_eq!(got, expected, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn zhang_bound_monotone_in_t() {
        let rule = rule64();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let t0 = random_boundary_t0(&mut rng, &rule);
        let x = BlochVector::new(0.6, 0.0, 0.8);
        let mut prev = f64::INFINITY;
        let mut t = 0.0f64;
        while t < 1.0 + 1e-9 {
            let y = zhang_bound(&t0, t.min(1.0), &x, 48);
            assert!(y < prev + 1e-12, "Y not decreasing at t = {t}");
            prev = y;
            t += 0.05;
        }
    }

    #[test]
    fn zhang_rejects_off_boundary() {
        let off = CorrelationDiag::isotropic(-0.3);
        let opt = OptimizerConfig::fast();
        assert!(matches!(
            zhang_criterion(&BlochVector::zero(), 0.5, &off, &opt, 32),
            Err(CriteriaError::BoundaryViolated { .. })
        ));
        // Within 1e-3 of the boundary: renormalized, not rejected.
        let near = CorrelationDiag::isotropic(-0.5 * 1.0005);
        assert!(zhang_criterion(&BlochVector::zero(), 0.5, &near, &opt, 32).is_ok());
    }

    #[test]
    fn max_on_sphere_quadratic() {
        let a = BlochVector::new(0.0, 0.0, 0.7);
        let opt = OptimizerConfig::default();
        let (x, v) = max_on_sphere(|x| a.dot(x).powi(2), &opt);
        assert_abs_diff_eq!(v, 0.49, epsilon = 1e-8);
        assert!(x.z.abs() > 1.0 - 1e-6);

        let t0 = CorrelationDiag::new(0.7, 0.5, 0.3);
        let (x, v) = max_on_sphere(|x| -t0.apply(x).norm(), &opt);
        assert_abs_diff_eq!(v, -0.3, epsilon = 1e-8);
        assert!(x.z.abs() > 1.0 - 1e-5);
    }

    #[test]
    fn max_on_sphere_against_dense_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let opt = OptimizerConfig::default();
        let dense = fibonacci_sphere(100_000);
        for _ in 0..20 {
            let a = BlochVector::new(
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            );
            let t = CorrelationDiag::new(
                rng.random::<f64>(),
                rng.random::<f64>(),
                rng.random::<f64>(),
            );
            let tv = 0.2 + 0.6 * rng.random::<f64>();
            let obj = |x: &BlochVector| {
                let ax = a.dot(x);
                ax * ax - (1.0 - 2.0 * tv * t.apply(x).norm())
            };
            let (_, found) = max_on_sphere(obj, &opt);
            let dense_max = dense.iter().map(obj).fold(f64::NEG_INFINITY, f64::max);
            assert!(found >= dense_max - 1e-6, "found {found}, dense {dense_max}");
        }
    }

    #[test]
    fn bowles_criterion_isotropic_examples() {
        let iso = CorrelationDiag::isotropic(0.5);
        let opt = OptimizerConfig::default();
        let rep = bowles_criterion(&BlochVector::new(0.0, 0.0, 0.7), 0.5, &iso, &opt).unwrap();
        assert!(rep.satisfied, "margin {}", rep.margin);
        assert_abs_diff_eq!(rep.margin, 0.49 - 0.5, epsilon = 1e-8);

        let rep = bowles_criterion(&BlochVector::new(0.0, 0.0, 0.72), 0.5, &iso, &opt).unwrap();
        assert!(!rep.satisfied);
        assert_abs_diff_eq!(rep.margin, 0.72 * 0.72 - 0.5, epsilon = 1e-8);
    }

    #[test]
    fn bowles_rejects_anisotropic_boundary_at_full_visibility() {
        let rule = rule64();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let opt = OptimizerConfig::fast();
        for _ in 0..5 {
            let t0 = random_boundary_t0(&mut rng, &rule);
            if t0.abs_max() <= 0.5 + 1e-9 {
                continue; // essentially isotropic draw
            }
            let rep = bowles_criterion(&BlochVector::zero(), 1.0, &t0, &opt).unwrap();
            assert!(!rep.satisfied);
            assert_abs_diff_eq!(rep.margin, 2.0 * t0.abs_max() - 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn zhang_criterion_at_boundary() {
        let rule = rule64();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let opt = OptimizerConfig::fast();
        for _ in 0..3 {
            let t0 = random_boundary_t0(&mut rng, &rule);
            let rep = zhang_criterion(&BlochVector::zero(), 1.0, &t0, &opt, 32).unwrap();
            assert!(rep.satisfied, "margin {}", rep.margin);
        }
        // Isotropic with a Bloch vector: the zone bound is sqrt(1-t).
        let iso = CorrelationDiag::isotropic(0.5);
        let rep = zhang_criterion(&BlochVector::new(0.0, 0.0, 0.3), 0.75, &iso, &opt, 32).unwrap();
        assert!(rep.satisfied);
        assert_abs_diff_eq!(rep.margin, 0.09 - 0.25, epsilon = 1e-7);
        let rep = zhang_criterion(&BlochVector::new(0.0, 0.0, 0.51), 0.75, &iso, &opt, 32).unwrap();
        assert!(!rep.satisfied);
    }

    #[test]
    fn max_bloch_isotropic_closed_forms() {
        let iso = CorrelationDiag::isotropic(0.5);
        let opt = OptimizerConfig::fast();
        let dir = BlochVector::new(0.0, 0.6, 0.8);
        for t in [0.0f64, 0.25, 0.5, 0.75, 1.0] {
            let expected = (1.0 - t).sqrt();
            let bowles =
                max_bloch_under_criterion(CriterionKind::Bowles, &iso, t, &dir, &opt, 32).unwrap();
            assert_abs_diff_eq!(bowles, expected, epsilon = 1e-6);
            let zhang =
                max_bloch_under_criterion(CriterionKind::Zhang, &iso, t, &dir, &opt, 32).unwrap();
            assert_abs_diff_eq!(zhang, expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn max_bloch_matches_min_ratio_oracle() {
        // Independent route: s_max = min over x of sqrt(max(B(x), 0)) / |dir.x|
        // on a dense lattice; agreement within the lattice resolution.
        let rule = rule64();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let opt = OptimizerConfig::fast();
        let dense = fibonacci_sphere(20_000);
        for _ in 0..4 {
            let t0 = random_boundary_t0(&mut rng, &rule);
            let t = 0.3 + 0.4 * rng.random::<f64>();
            let dir = BlochVector::e_z();
            for kind in [CriterionKind::Bowles, CriterionKind::Zhang] {
                let got = match max_bloch_under_criterion(kind, &t0, t, &dir, &opt, 32) {
                    Ok(v) => v,
                    Err(CriteriaError::NoBlochVectorAllowed { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let t0n = match kind {
                    CriterionKind::Bowles => t0,
                    CriterionKind::Zhang => boundary_normalized(&t0, &rule).unwrap(),
                };
                let oracle = dense
                    .iter()
                    .filter(|x| dir.dot(x).abs() > 0.05)
                    .map(|x| {
                        let b2 = bound_sq(kind, &t0n, t, x, 32).max(0.0);
                        b2.sqrt() / dir.dot(x).abs()
                    })
                    .fold(f64::INFINITY, f64::min)
                    .min(1.0);
                assert!(
                    (got - oracle).abs() < 5e-3,
                    "{kind:?}: bisection {got}, oracle {oracle}"
                );
            }
        }
    }

    #[test]
    fn case1_dominance_isotropic_and_random() {
        let iso = CorrelationDiag::isotropic(0.5);
        let opt = OptimizerConfig::fast();
        assert!(case1_dominance_check(&iso, 0.5, &opt, 32).unwrap());

        let rule = rule64();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..5 {
            let t0 = random_boundary_t0(&mut rng, &rule);
            for t in [0.2, 0.5, 0.8] {
                assert!(case1_dominance_check(&t0, t, &opt, 32).unwrap());
            }
        }
    }

    #[test]
    fn appendix_derivatives_isotropic() {
        let iso = CorrelationDiag::isotropic(0.5);
        let rep = appendix_derivative_check(&iso, 0.5, 1e-4, 64).unwrap();
        // For the isotropic boundary both rates coincide: -1/(2 sqrt(1-t)).
        let expected = -0.5 / 0.5_f64.sqrt();
        assert_abs_diff_eq!(rep.x_rate, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.y_rate_closed, expected, epsilon = 1e-10);
        assert!(rep.fd_vs_closed < 1e-5);
        assert!(rep.chain_holds);
    }

    #[test]
    fn appendix_derivatives_random_boundary() {
        let rule = rule64();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut checked = 0;
        while checked < 5 {
            let t0 = random_boundary_t0(&mut rng, &rule);
            if t0.abs_sorted()[2] > 0.6 {
                continue;
            }
            checked += 1;
            for t in [0.2, 0.5, 0.8] {
                let rep = appendix_derivative_check(&t0, t, 1e-4, 64).unwrap();
                assert!(rep.chain_holds, "chain failed: {rep:?}");
                assert!(rep.fd_vs_closed < 1e-5, "fd vs closed: {rep:?}");
                assert!(rep.y_rate_fd <= 1e-6);
            }
        }
    }

    #[test]
    fn appendix_domain_errors() {
        let iso = CorrelationDiag::isotropic(0.5);
        assert!(appendix_derivative_check(&iso, 0.99999, 1e-4, 32).is_err());
        let rule = rule64();
        let skewed = critical_scaling(&CorrelationDiag::new(0.2, 0.2, 1.0), &rule)
            .unwrap()
            .t_critical;
        // Large component forces 2 (t+h) |T0,z| >= 1 well below t = 1.
        assert!(matches!(
            appendix_derivative_check(&skewed, 0.8, 1e-4, 32),
            Err(CriteriaError::DomainError(_))
        ));
    }

    #[test]
    fn figure_panels_smoke() {
        let opt = OptimizerConfig::fast();
        let rows_a = figure1_data(Panel::A, 10, &opt, 32).unwrap();
        assert_eq!(rows_a.len(), 10);
        for row in &rows_a {
            assert!(
                row.amax_bowles >= row.amax_zhang - 1e-6,
                "panel A ordering at {}: bowles {} zhang {}",
                row.abscissa,
                row.amax_bowles,
                row.amax_zhang
            );
            let w = row.abscissa;
            let cap = (1.0 - w).min((w * (w + 2.0)).sqrt());
            assert_abs_diff_eq!(row.amax_psd, cap, epsilon = 1e-6);
        }
        // Right edge of panel A is the isotropic point.
        let last = rows_a.last().unwrap();
        assert_abs_diff_eq!(last.amax_psd, 0.5, epsilon = 1e-6);
        assert!(last.amax_bowles < 1e-5);

        let rows_b = figure1_data(Panel::B, 20, &opt, 32).unwrap();
        let crossover = crossover_abscissa(&rows_b).expect("panel B crossover exists");
        assert!(
            (0.1..0.35).contains(&crossover),
            "unexpected crossover {crossover}"
        );
        for row in &rows_b {
            let cap = (0.75 - row.abscissa).sqrt();
            assert_abs_diff_eq!(row.amax_psd, cap, epsilon = 1e-6);
        }
    }

    #[test]
    fn maximizer_orientation_on_panels() {
        // The Bowles-type objective peaks orthogonal to the Bloch vector on
        // the panel families; the zone objective peaks parallel to it.
        let rule = rule64();
        let opt = OptimizerConfig::default();
        let state_t = CorrelationDiag::new(-0.3, -0.3, -0.5);
        let t = surface_norm(&state_t, &rule);
        let t0 = state_t.scaled(1.0 / t);
        let dir = BlochVector::e_x();

        let s_bowles =
            max_bloch_under_criterion(CriterionKind::Bowles, &t0, t, &dir, &opt, 48).unwrap();
        let rep = bowles_criterion(&dir.scaled(s_bowles), t, &t0, &opt).unwrap();
        assert!(
            rep.witness.dot(&dir).abs() < 1e-2,
            "bowles witness not orthogonal: {:?}",
            rep.witness
        );

        let s_zhang =
            max_bloch_under_criterion(CriterionKind::Zhang, &t0, t, &dir, &opt, 48).unwrap();
        let rep = zhang_criterion(&dir.scaled(s_zhang), t, &t0, &opt, 48).unwrap();
        assert!(
            rep.witness.dot(&dir).abs() > 1.0 - 1e-2,
            "zhang witness not parallel: {:?}",
            rep.witness
        );
    }

    #[test]
    fn classify_reference_states() {
        let config = ClassifyConfig {
            order: 48,
            opt: OptimizerConfig::fast(),
        };
        let sep = CanonicalState::bell_diagonal(CorrelationDiag::isotropic(-0.2));
        assert_eq!(
            classify(&sep, &config).unwrap().verdict,
            Verdict::SeparableBellDiagonal
        );

        let steer = CanonicalState::bell_diagonal(CorrelationDiag::isotropic(-0.8));
        assert_eq!(
            classify(&steer, &config).unwrap().verdict,
            Verdict::SteerableAtoB
        );

        let cert = CanonicalState::new(
            BlochVector::new(0.0, 0.0, 0.3),
            CorrelationDiag::isotropic(-0.4),
        );
        let report = classify(&cert, &config).unwrap();
        assert_eq!(report.verdict, Verdict::UnsteerableCertified);
        let certificate = report.certificate.unwrap();
        assert_eq!(certificate.criterion, CriterionKind::Bowles);
        let bowles = report.bowles.unwrap();
        assert_abs_diff_eq!(bowles.margin, 0.09 - 0.2, epsilon = 1e-7);
    }

    #[test]
    fn classify_degenerate_and_undetermined() {
        let config = ClassifyConfig {
            order: 48,
            opt: OptimizerConfig::fast(),
        };
        let degenerate = CanonicalState::bell_diagonal(CorrelationDiag::new(0.9, 0.1, 0.0));
        let rep = classify(&degenerate, &config).unwrap();
        assert_eq!(rep.verdict, Verdict::SeparableBellDiagonal);
        assert!(rep.degenerate);

        // Strong Bloch vector on a strongly correlated state: both criteria
        // fail and no steering decision is available for a != 0.
        let unknown = CanonicalState::new(
            BlochVector::new(0.0, 0.0, 0.5),
            CorrelationDiag::isotropic(-0.49),
        );
        let rep = classify(&unknown, &config).unwrap();
        assert_eq!(rep.verdict, Verdict::Undetermined);
        assert!(rep.bowles.is_some());
        assert!(rep.zhang.is_some());
    }

    #[test]
    fn classify_zhang_certificate() {
        // Close to the boundary with strong anisotropy: the Bowles-type
        // criterion hits its lockout but the zone criterion certifies a = 0.
        let rule = rule64();
        let config = ClassifyConfig {
            order: 48,
            opt: OptimizerConfig::fast(),
        };
        let t0 = critical_scaling(&CorrelationDiag::new(-0.4, -0.5, -1.0), &rule)
            .unwrap()
            .t_critical;
        let state = CanonicalState::new(BlochVector::zero(), t0.scaled(0.97));
        assert!(
            2.0 * 0.97 * t0.abs_max() > 1.0,
            "test setup must trigger the lockout"
        );
        let rep = classify(&state, &config).unwrap();
        assert_eq!(rep.verdict, Verdict::UnsteerableCertified);
        let cert = rep.certificate.unwrap();
        assert_eq!(cert.criterion, CriterionKind::Zhang);
        let params = cert.model.unwrap();
        assert_abs_diff_eq!(params.t, 0.97, epsilon = 1e-6);
        assert_abs_diff_eq!(params.c, (1.0 - params.t).sqrt(), epsilon = 1e-9);
    }
}
