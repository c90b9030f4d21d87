//! Deterministic quadrature over the unit sphere.
//!
//! The workhorse is a product rule: Gauss-Legendre nodes in `z = cos(theta)`
//! times a uniform grid in `phi` (trapezoidal, exact for trigonometric
//! polynomials). Caps and zones restrict the `z` range after rotating the
//! frame so the region axis becomes the pole.

use crate::pauli_core::BlochVector;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand is not finite at node ({x:.6}, {y:.6}, {z:.6})")]
    NonFiniteIntegrand { x: f64, y: f64, z: f64 },
    #[error("cap bound c = {c} outside [-1, 1]")]
    InvalidCap { c: f64 },
    #[error("axis is not unit norm (norm {norm})")]
    NonUnitAxis { norm: f64 },
}

/// Nodes and weights for an integral over the full unit sphere.
///
/// Weights are in steradians and sum to 4 pi.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    order: usize,
    nodes: Vec<BlochVector>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[BlochVector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Spherical cap `{ lambda : lambda . axis < c }`.
#[derive(Debug, Clone, Copy)]
pub struct CapSpec {
    pub axis: BlochVector,
    pub c: f64,
}

impl CapSpec {
    pub fn new(axis: BlochVector, c: f64) -> Result<Self, QuadError> {
        if !axis.is_unit(1e-12) {
            return Err(QuadError::NonUnitAxis { norm: axis.norm() });
        }
        if !(-1.0..=1.0).contains(&c) {
            return Err(QuadError::InvalidCap { c });
        }
        Ok(Self { axis, c })
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; accurate to machine
/// precision for the orders used here (n <= a few hundred).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess for the i-th positive root.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) via the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

type GlNodes = Arc<(Vec<f64>, Vec<f64>)>;

/// Memoized Gauss-Legendre nodes; the optimizer evaluates many zone
/// integrals at a fixed order.
fn gauss_legendre_cached(n: usize) -> GlNodes {
    static CACHE: OnceLock<Mutex<HashMap<usize, GlNodes>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("GL cache poisoned");
    map.entry(n)
        .or_insert_with(|| Arc::new(gauss_legendre(n)))
        .clone()
}

/// Product rule over the full sphere: `order` Gauss-Legendre nodes in z
/// times `2 * order` uniform phi nodes.
pub fn build_rule(order: usize) -> QuadratureRule {
    assert!(order >= 4, "quadrature order must be at least 4");
    let gl = gauss_legendre_cached(order);
    let (z_nodes, z_weights) = (&gl.0, &gl.1);
    let n_phi = 2 * order;
    let w_phi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(order * n_phi);
    let mut weights = Vec::with_capacity(order * n_phi);
    for (z, wz) in z_nodes.iter().zip(z_weights) {
        let r = (1.0 - z * z).max(0.0).sqrt();
        for j in 0..n_phi {
            let phi = w_phi * j as f64;
            nodes.push(BlochVector::new(r * phi.cos(), r * phi.sin(), *z));
            weights.push(wz * w_phi);
        }
    }
    QuadratureRule {
        order,
        nodes,
        weights,
    }
}

/// Integral of `g` over the full sphere with the given rule.
pub fn sphere_integral<F>(g: F, rule: &QuadratureRule) -> Result<f64, QuadError>
where
    F: Fn(&BlochVector) -> f64,
{
    let mut sum = 0.0;
    for (node, w) in rule.nodes.iter().zip(&rule.weights) {
        let v = g(node);
        if !v.is_finite() {
            return Err(QuadError::NonFiniteIntegrand {
                x: node.x,
                y: node.y,
                z: node.z,
            });
        }
        sum += w * v;
    }
    Ok(sum)
}

/// Deterministic right-handed orthonormal frame `(u, v, axis)`.
///
/// The seed vector is `z_hat` unless `|axis . z_hat| > 0.9`, in which case
/// `x_hat`; `u` is the seed orthogonalized against the axis, `v = axis x u`.
pub fn frame_from_axis(axis: &BlochVector) -> (BlochVector, BlochVector) {
    debug_assert!(axis.is_unit(1e-12));
    let seed = if axis.z.abs() > 0.9 {
        BlochVector::e_x()
    } else {
        BlochVector::e_z()
    };
    let u = seed
        .sub(&axis.scaled(seed.dot(axis)))
        .normalized()
        .expect("seed is never parallel to axis");
    let v = axis.cross(&u);
    (u, v)
}

/// Integral of `g` over the zone `z_lo < lambda . axis < z_hi`.
///
/// Gauss-Legendre in `z = lambda . axis` mapped to the zone, uniform phi.
pub fn zone_integral<F>(
    g: F,
    axis: &BlochVector,
    z_lo: f64,
    z_hi: f64,
    order: usize,
) -> Result<f64, QuadError>
where
    F: Fn(&BlochVector) -> f64,
{
    assert!(order >= 4, "quadrature order must be at least 4");
    if !axis.is_unit(1e-12) {
        return Err(QuadError::NonUnitAxis { norm: axis.norm() });
    }
    let half_width = 0.5 * (z_hi - z_lo);
    if half_width <= 0.0 {
        return Ok(0.0);
    }
    let mid = 0.5 * (z_hi + z_lo);
    let (u, v) = frame_from_axis(axis);
    let gl = gauss_legendre_cached(order);
    let (z_nodes, z_weights) = (&gl.0, &gl.1);
    let n_phi = 2 * order;
    let w_phi = 2.0 * PI / n_phi as f64;

    let mut sum = 0.0;
    for (zeta, wz) in z_nodes.iter().zip(z_weights) {
        let z = mid + half_width * zeta;
        let r = (1.0 - z * z).max(0.0).sqrt();
        for j in 0..n_phi {
            let phi = w_phi * j as f64;
            let node = axis
                .scaled(z)
                .add(&u.scaled(r * phi.cos()))
                .add(&v.scaled(r * phi.sin()));
            let val = g(&node);
            if !val.is_finite() {
                return Err(QuadError::NonFiniteIntegrand {
                    x: node.x,
                    y: node.y,
                    z: node.z,
                });
            }
            sum += wz * half_width * w_phi * val;
        }
    }
    Ok(sum)
}

/// Integral of `g` over the cap `lambda . axis < cap.c`.
pub fn cap_integral<F>(g: F, cap: &CapSpec, order: usize) -> Result<f64, QuadError>
where
    F: Fn(&BlochVector) -> f64,
{
    zone_integral(g, &cap.axis, -1.0, cap.c, order)
}

/// Near-uniform deterministic lattice of `n` points on the sphere
/// (golden-angle spiral). Used as the coarse grid for sphere optimization
/// and as a generic probe set.
pub fn fibonacci_sphere(n: usize) -> Vec<BlochVector> {
    let golden_angle = PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            BlochVector::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}
