//! Pauli/Bloch algebra for two-qubit states.
//!
//! States are kept in the canonical parameterization: one Bloch vector on
//! Alice's side and a diagonal spin correlation matrix,
//!
//! ```text
//! rho = (1/4) [ 1 + a.sigma (x) 1 + sum_i T_i sigma_i (x) sigma_i ]
//! ```
//!
//! in the product basis |00>, |01>, |10>, |11> with `sigma_z|0> = |0>`.
//! General 4x4 density matrices are handled through [`decompose`] /
//! [`to_canonical`]; physicality is the positive-semidefinite condition on the
//! reconstructed operator.

use nalgebra::{Complex, Matrix2, Matrix3, Matrix4, Vector3, SVD};
use thiserror::Error;

/// Slack allowed below zero for the smallest eigenvalue of a physical state.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Entrywise tolerance for Hermiticity and unit-trace checks.
pub const MATRIX_TOLERANCE: f64 = 1e-12;

type C64 = Complex<f64>;
type CMat2 = Matrix2<C64>;
type CMat4 = Matrix4<C64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NonHermitian { residual: f64 },
    #[error("matrix trace {trace:.12} is not 1")]
    NonUnitTrace { trace: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("Bob's Bloch vector has norm {norm:.3e}; canonical form requires zero")]
    BobBlochNonzero { norm: f64 },
    #[error("correlation matrix admits no physical state even with a = 0")]
    UnphysicalT,
}

/// A real three-vector in Bloch coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub const fn e_x() -> Self {
        Self::new(1.0, 0.0, 0.0)
    }

    pub const fn e_y() -> Self {
        Self::new(0.0, 1.0, 0.0)
    }

    pub const fn e_z() -> Self {
        Self::new(0.0, 0.0, 1.0)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }

    /// Unit vector along `self`; `None` for (numerically) zero input.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n < 1e-300 {
            None
        } else {
            Some(self.scaled(1.0 / n))
        }
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    fn from_nalgebra(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    fn to_nalgebra(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }
}

/// Diagonal spin correlation matrix `T = diag(Tx, Ty, Tz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationDiag {
    pub tx: f64,
    pub ty: f64,
    pub tz: f64,
}

impl CorrelationDiag {
    pub const fn new(tx: f64, ty: f64, tz: f64) -> Self {
        Self { tx, ty, tz }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub const fn isotropic(t: f64) -> Self {
        Self::new(t, t, t)
    }

    /// Componentwise action `T v`.
    pub fn apply(&self, v: &BlochVector) -> BlochVector {
        BlochVector::new(self.tx * v.x, self.ty * v.y, self.tz * v.z)
    }

    /// `T^{-1} v`; caller guarantees `det != 0`.
    pub fn apply_inverse(&self, v: &BlochVector) -> BlochVector {
        BlochVector::new(v.x / self.tx, v.y / self.ty, v.z / self.tz)
    }

    pub fn det(&self) -> f64 {
        self.tx * self.ty * self.tz
    }

    pub fn is_singular(&self) -> bool {
        self.det().abs() <= 1e-12
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.tx * s, self.ty * s, self.tz * s)
    }

    pub fn abs_max(&self) -> f64 {
        self.tx.abs().max(self.ty.abs()).max(self.tz.abs())
    }

    pub fn abs_sum(&self) -> f64 {
        self.tx.abs() + self.ty.abs() + self.tz.abs()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.tx, self.ty, self.tz]
    }

    /// Components sorted by increasing absolute value.
    pub fn abs_sorted(&self) -> [f64; 3] {
        let mut v = [self.tx.abs(), self.ty.abs(), self.tz.abs()];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }
}

/// Canonical two-qubit state: Alice Bloch vector plus diagonal correlations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalState {
    pub a: BlochVector,
    pub t: CorrelationDiag,
}

impl CanonicalState {
    pub const fn new(a: BlochVector, t: CorrelationDiag) -> Self {
        Self { a, t }
    }

    pub const fn bell_diagonal(t: CorrelationDiag) -> Self {
        Self::new(BlochVector::zero(), t)
    }

    pub fn is_bell_diagonal(&self) -> bool {
        self.a.norm() <= 1e-10
    }

    /// Checks the positive-semidefinite condition on the reconstructed operator.
    pub fn validate(&self) -> Result<(), PauliError> {
        let m = min_eigenvalue(self);
        if m < -PSD_TOLERANCE {
            Err(PauliError::NotPositive { min_eigenvalue: m })
        } else {
            Ok(())
        }
    }
}

/// A 4x4 complex density matrix (Hermitian, unit trace).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4 {
    m: CMat4,
}

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positive semidefiniteness.
    pub fn validated(m: CMat4) -> Result<Self, PauliError> {
        let herm = hermiticity_residual(&m);
        if herm > MATRIX_TOLERANCE {
            return Err(PauliError::NonHermitian { residual: herm });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > MATRIX_TOLERANCE || tr.im.abs() > MATRIX_TOLERANCE {
            return Err(PauliError::NonUnitTrace { trace: tr.re });
        }
        let min = hermitian_min_eigenvalue(&m);
        if min < -PSD_TOLERANCE {
            return Err(PauliError::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { m })
    }

    /// Wraps without checks; used for operators built from exact formulas,
    /// which may be intentionally unphysical when probing physicality.
    pub fn from_matrix_unchecked(m: CMat4) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.m
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_min_eigenvalue(&self.m)
    }
}

/// Pauli expansion of a general two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliDecomposition {
    /// Alice's local Bloch vector.
    pub a: BlochVector,
    /// Bob's local Bloch vector.
    pub b: BlochVector,
    /// Full 3x3 spin correlation matrix `T_ij = Tr[rho sigma_i (x) sigma_j]`.
    pub t_full: Matrix3<f64>,
}

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity2() -> CMat2 {
    Matrix2::identity()
}

/// The Pauli matrices, indexed 0 = x, 1 = y, 2 = z.
pub fn sigma(i: usize) -> CMat2 {
    match i {
        0 => Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        1 => Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        2 => Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
        _ => panic!("Pauli index out of range: {i}"),
    }
}

/// `v . sigma` as a 2x2 matrix.
pub fn dot_sigma(v: &BlochVector) -> CMat2 {
    Matrix2::new(
        c(v.z, 0.0),
        c(v.x, -v.y),
        c(v.x, v.y),
        c(-v.z, 0.0),
    )
}

fn hermiticity_residual(m: &CMat4) -> f64 {
    let diff = m - m.adjoint();
    diff.iter().map(|e| e.norm()).fold(0.0, f64::max)
}

fn hermitian_min_eigenvalue(m: &CMat4) -> f64 {
    // Symmetrize first so tiny non-Hermitian roundoff cannot leak in.
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Builds the canonical-form operator from its parameters.
///
/// The output is Hermitian with unit trace by construction. It is *not*
/// required to be positive; [`min_eigenvalue`] probes exactly that.
pub fn reconstruct(state: &CanonicalState) -> DensityMatrix4 {
    let id2 = identity2();
    let mut m = id2.kronecker(&id2);
    m += dot_sigma(&state.a).kronecker(&id2);
    let t = state.t.as_array();
    for (i, ti) in t.iter().enumerate() {
        m += (sigma(i) * c(*ti, 0.0)).kronecker(&sigma(i));
    }
    DensityMatrix4::from_matrix_unchecked(m.scale(0.25))
}

/// Pauli expansion coefficients of a valid density matrix.
pub fn decompose(rho: &DensityMatrix4) -> Result<PauliDecomposition, PauliError> {
    // Re-validate: callers may have built the matrix unchecked.
    let rho = DensityMatrix4::validated(*rho.matrix())?;
    let m = rho.matrix();
    let id2 = identity2();

    let mut a = [0.0; 3];
    let mut b = [0.0; 3];
    let mut t = Matrix3::zeros();
    for i in 0..3 {
        a[i] = (m * sigma(i).kronecker(&id2)).trace().re;
        b[i] = (m * id2.kronecker(&sigma(i))).trace().re;
        for j in 0..3 {
            t[(i, j)] = (m * sigma(i).kronecker(&sigma(j))).trace().re;
        }
    }
    Ok(PauliDecomposition {
        a: BlochVector::new(a[0], a[1], a[2]),
        b: BlochVector::new(b[0], b[1], b[2]),
        t_full: t,
    })
}

/// Rotates a decomposition with zero Bob Bloch vector into canonical form.
///
/// Returns the canonical state together with the proper rotations
/// `(r_a, r_b)` applied on Alice's and Bob's side, so that
/// `r_a * t_full * r_b^T` is diagonal and `a_canonical = r_a * a`.
pub fn to_canonical_with_rotations(
    dec: &PauliDecomposition,
) -> Result<(CanonicalState, Matrix3<f64>, Matrix3<f64>), PauliError> {
    let b_norm = dec.b.norm();
    if b_norm > 1e-10 {
        return Err(PauliError::BobBlochNonzero { norm: b_norm });
    }

    let svd = SVD::new(dec.t_full, true, true);
    let u = svd.u.expect("3x3 SVD requested with u");
    let v_t = svd.v_t.expect("3x3 SVD requested with v_t");
    let s = svd.singular_values;

    // Fold any reflection into the last singular value so both local
    // transforms are proper rotations; the diagonal may pick up a sign.
    let du = u.determinant().signum();
    let dv = v_t.determinant().signum();
    let sign_fix = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, du));
    let sign_fix_v = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, dv));
    let r_a = (u * sign_fix).transpose();
    let r_b = sign_fix_v * v_t;
    let diag = Vector3::new(s[0], s[1], du * dv * s[2]);

    let a_rot = r_a * dec.a.to_nalgebra();
    let state = CanonicalState::new(
        BlochVector::from_nalgebra(&a_rot),
        CorrelationDiag::new(diag[0], diag[1], diag[2]),
    );
    Ok((state, r_a, r_b))
}

/// [`to_canonical_with_rotations`] without the rotation bookkeeping.
pub fn to_canonical(dec: &PauliDecomposition) -> Result<CanonicalState, PauliError> {
    to_canonical_with_rotations(dec).map(|(s, _, _)| s)
}

/// Smallest eigenvalue of the reconstructed canonical-form operator.
pub fn min_eigenvalue(state: &CanonicalState) -> f64 {
    reconstruct(state).min_eigenvalue()
}

/// Largest Bloch length `s` such that `(a = s dir, T)` stays positive
/// semidefinite, found by bisection on [0, 1] to 1e-8.
pub fn max_bloch_psd(t: &CorrelationDiag, dir: &BlochVector) -> Result<f64, PauliError> {
    debug_assert!(dir.is_unit(1e-12), "direction must be unit norm");
    if min_eigenvalue(&CanonicalState::new(BlochVector::zero(), *t)) < -PSD_TOLERANCE {
        return Err(PauliError::UnphysicalT);
    }
    // Tighter slack inside the bisection: where the smallest eigenvalue is
    // quadratically tangent to zero, tolerance eps costs sqrt(eps) in s.
    let physical = |s: f64| min_eigenvalue(&CanonicalState::new(dir.scaled(s), *t)) >= -1e-13;
    if physical(1.0) {
        return Ok(1.0);
    }
    if !physical(0.0) {
        // Within the type-level PSD slack but below the bisection slack:
        // the state touches the boundary already at s = 0.
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if physical(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Octahedron condition for separability of a Bell diagonal state.
pub fn bell_diagonal_separable(t: &CorrelationDiag) -> bool {
    t.abs_sum() <= 1.0 + 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::Rotation3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Eigenvalues of a canonical state with `a` along the z axis, from the
    /// 2x2 block structure in the product basis. Independent of the dense
    /// eigensolver used by the implementation.
    fn block_eigenvalues(az: f64, t: &CorrelationDiag) -> [f64; 4] {
        let outer = (az * az + (t.tx - t.ty).powi(2)).sqrt();
        let inner = (az * az + (t.tx + t.ty).powi(2)).sqrt();
        [
            (1.0 + t.tz + outer) / 4.0,
            (1.0 + t.tz - outer) / 4.0,
            (1.0 - t.tz + inner) / 4.0,
            (1.0 - t.tz - inner) / 4.0,
        ]
    }

    fn singlet_matrix() -> CMat4 {
        let mut m = Matrix4::zeros();
        m[(1, 1)] = c(0.5, 0.0);
        m[(2, 2)] = c(0.5, 0.0);
        m[(1, 2)] = c(-0.5, 0.0);
        m[(2, 1)] = c(-0.5, 0.0);
        m
    }

    #[test]
    fn decompose_singlet() {
        let rho = DensityMatrix4::validated(singlet_matrix()).unwrap();
        let dec = decompose(&rho).unwrap();
        assert!(dec.a.norm() < 1e-14);
        assert!(dec.b.norm() < 1e-14);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { -1.0 } else { 0.0 };
                assert_abs_diff_eq!(dec.t_full[(i, j)], expected, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn decompose_maximally_mixed() {
        let rho = DensityMatrix4::validated(Matrix4::identity().scale(0.25)).unwrap();
        let dec = decompose(&rho).unwrap();
        assert!(dec.a.norm() < 1e-14);
        assert!(dec.b.norm() < 1e-14);
        assert!(dec.t_full.norm() < 1e-14);
    }

    #[test]
    fn reconstruct_decompose_round_trip() {
        let state = CanonicalState::new(
            BlochVector::new(0.0, 0.0, 0.3),
            CorrelationDiag::new(-0.4, -0.4, -0.4),
        );
        let dec = decompose(&reconstruct(&state)).unwrap();
        assert_abs_diff_eq!(dec.a.z, 0.3, epsilon = 1e-13);
        assert!(dec.b.norm() < 1e-13);
        for i in 0..3 {
            assert_abs_diff_eq!(dec.t_full[(i, i)], -0.4, epsilon = 1e-13);
        }
    }

    #[test]
    fn round_trip_many_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0u32;
        while checked < 1000 {
            let a = BlochVector::new(
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            );
            let t = CorrelationDiag::new(
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            );
            let state = CanonicalState::new(a, t);
            if min_eigenvalue(&state) < -PSD_TOLERANCE {
                continue;
            }
            checked += 1;
            let dec = decompose(&reconstruct(&state)).unwrap();
            assert!(dec.b.norm() < 1e-12);
            assert_abs_diff_eq!(dec.a.x, a.x, epsilon = 1e-12);
            assert_abs_diff_eq!(dec.a.y, a.y, epsilon = 1e-12);
            assert_abs_diff_eq!(dec.a.z, a.z, epsilon = 1e-12);
            assert_abs_diff_eq!(dec.t_full[(0, 0)], t.tx, epsilon = 1e-12);
            assert_abs_diff_eq!(dec.t_full[(1, 1)], t.ty, epsilon = 1e-12);
            assert_abs_diff_eq!(dec.t_full[(2, 2)], t.tz, epsilon = 1e-12);
            assert!(dec.t_full[(0, 1)].abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruct_singlet() {
        let state = CanonicalState::bell_diagonal(CorrelationDiag::isotropic(-1.0));
        let rho = reconstruct(&state);
        let diff = rho.matrix() - singlet_matrix();
        assert!(diff.iter().map(|e| e.norm()).fold(0.0, f64::max) < 1e-14);
    }

    #[test]
    fn reconstruct_product_state_eigenvalues() {
        // a = z, T = 0 gives (|0><0| (x) 1)/2 with eigenvalues {1/2, 1/2, 0, 0}.
        let state = CanonicalState::new(BlochVector::e_z(), CorrelationDiag::zero());
        let rho = reconstruct(&state);
        let mut eig: Vec<f64> = rho
            .matrix()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [0.0, 0.0, 0.5, 0.5];
        for (got, want) in eig.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn min_eigenvalue_known_cases() {
        let singlet = CanonicalState::bell_diagonal(CorrelationDiag::isotropic(-1.0));
        assert_abs_diff_eq!(min_eigenvalue(&singlet), 0.0, epsilon = 1e-12);

        let mixed = CanonicalState::bell_diagonal(CorrelationDiag::zero());
        assert_abs_diff_eq!(min_eigenvalue(&mixed), 0.25, epsilon = 1e-12);

        let state = CanonicalState::new(
            BlochVector::new(0.0, 0.0, 0.3),
            CorrelationDiag::isotropic(-0.4),
        );
        let got = min_eigenvalue(&state);
        assert!(got >= 0.0);
        let expected = block_eigenvalues(0.3, &state.t)
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
    }

    #[test]
    fn min_eigenvalue_matches_block_oracle_on_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let az = rng.random::<f64>() * 2.0 - 1.0;
            let t = CorrelationDiag::new(
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            );
            let state = CanonicalState::new(BlochVector::new(0.0, 0.0, az), t);
            let expected = block_eigenvalues(az, &t)
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            assert_abs_diff_eq!(min_eigenvalue(&state), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn tetrahedron_vertices_are_pure() {
        let vertices = [
            CorrelationDiag::new(-1.0, -1.0, -1.0),
            CorrelationDiag::new(-1.0, 1.0, 1.0),
            CorrelationDiag::new(1.0, -1.0, 1.0),
            CorrelationDiag::new(1.0, 1.0, -1.0),
        ];
        for t in vertices {
            let rho = reconstruct(&CanonicalState::bell_diagonal(t));
            let mut eig: Vec<f64> = rho
                .matrix()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .collect();
            eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!(eig[0].abs() < 1e-10);
            assert!(eig[1].abs() < 1e-10);
            assert!(eig[2].abs() < 1e-10);
            assert_abs_diff_eq!(eig[3], 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn to_canonical_identity_on_diagonal() {
        let dec = PauliDecomposition {
            a: BlochVector::new(0.1, 0.0, 0.2),
            b: BlochVector::zero(),
            t_full: Matrix3::from_diagonal(&Vector3::new(-0.5, -0.3, -0.2)),
        };
        let state = to_canonical(&dec).unwrap();
        // SVD orders by absolute value; compare sorted magnitudes and spectrum.
        let original = CanonicalState::new(dec.a, CorrelationDiag::new(-0.5, -0.3, -0.2));
        assert_abs_diff_eq!(
            min_eigenvalue(&state),
            min_eigenvalue(&original),
            epsilon = 1e-10
        );
        let got = state.t.abs_sorted();
        assert_abs_diff_eq!(got[0], 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(got[1], 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(got[2], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn to_canonical_rotated_singlet() {
        let rot = Rotation3::from_euler_angles(0.3, -0.8, 1.1);
        let t_full = rot.matrix() * Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, -1.0))
            * rot.matrix().transpose();
        let dec = PauliDecomposition {
            a: BlochVector::zero(),
            b: BlochVector::zero(),
            t_full,
        };
        let state = to_canonical(&dec).unwrap();
        let abs = state.t.abs_sorted();
        for v in abs {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(min_eigenvalue(&state), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn to_canonical_rejects_bob_bloch() {
        let dec = PauliDecomposition {
            a: BlochVector::zero(),
            b: BlochVector::new(0.1, 0.0, 0.0),
            t_full: Matrix3::zeros(),
        };
        match to_canonical(&dec) {
            Err(PauliError::BobBlochNonzero { norm }) => {
                assert_abs_diff_eq!(norm, 0.1, epsilon = 1e-14)
            }
            other => panic!("expected BobBlochNonzero, got {other:?}"),
        }
    }

    #[test]
    fn to_canonical_invariant_under_local_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let base = CanonicalState::new(
                BlochVector::new(0.0, 0.0, rng.random::<f64>() * 0.4),
                CorrelationDiag::new(
                    -(0.2 + 0.3 * rng.random::<f64>()),
                    -(0.2 + 0.3 * rng.random::<f64>()),
                    -(0.2 + 0.3 * rng.random::<f64>()),
                ),
            );
            if min_eigenvalue(&base) < -PSD_TOLERANCE {
                continue;
            }
            let ra = Rotation3::from_euler_angles(
                rng.random::<f64>() * std::f64::consts::TAU,
                rng.random::<f64>() * std::f64::consts::PI,
                rng.random::<f64>() * std::f64::consts::TAU,
            );
            let rb = Rotation3::from_euler_angles(
                rng.random::<f64>() * std::f64::consts::TAU,
                rng.random::<f64>() * std::f64::consts::PI,
                rng.random::<f64>() * std::f64::consts::TAU,
            );
            let t_diag = Matrix3::from_diagonal(&Vector3::new(base.t.tx, base.t.ty, base.t.tz));
            let dec = PauliDecomposition {
                a: BlochVector::from_nalgebra(&(ra.matrix() * base.a.to_nalgebra())),
                b: BlochVector::zero(),
                t_full: ra.matrix() * t_diag * rb.matrix().transpose(),
            };
            let state = to_canonical(&dec).unwrap();
            assert_abs_diff_eq!(
                min_eigenvalue(&state),
                min_eigenvalue(&base),
                epsilon = 1e-10
            );
            assert_abs_diff_eq!(state.a.norm(), base.a.norm(), epsilon = 1e-10);
        }
    }

    #[test]
    fn max_bloch_psd_axial_families() {
        // |Tz| <= |Tx| = |Ty| = 1/2 with a along z: cap is
        // min(1 - |Tz|, sqrt(|Tz| (|Tz| + 2))).
        for i in 0..=10 {
            let w = 0.5 * i as f64 / 10.0;
            let t = CorrelationDiag::new(-0.5, -0.5, -w);
            let got = max_bloch_psd(&t, &BlochVector::e_z()).unwrap();
            let expected = (1.0 - w).min((w * (w + 2.0)).sqrt());
            assert_abs_diff_eq!(got, expected, epsilon = 1e-6);
        }
        // |Tx| = |Ty| <= |Tz| = 1/2 with a along x: cap is sqrt(3/4 - |Tx|).
        for i in 1..=10 {
            let xi = 0.5 * i as f64 / 10.0;
            let t = CorrelationDiag::new(-xi, -xi, -0.5);
            let got = max_bloch_psd(&t, &BlochVector::e_x()).unwrap();
            let expected = (0.75 - xi).sqrt();
            assert_abs_diff_eq!(got, expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn max_bloch_psd_examples() {
        let t = CorrelationDiag::new(-0.5, -0.5, -0.5);
        assert_abs_diff_eq!(
            max_bloch_psd(&t, &BlochVector::e_z()).unwrap(),
            0.5,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            max_bloch_psd(&t, &BlochVector::e_x()).unwrap(),
            0.5,
            epsilon = 1e-6
        );
        let degenerate = CorrelationDiag::new(-0.5, -0.5, 0.0);
        assert_abs_diff_eq!(
            max_bloch_psd(&degenerate, &BlochVector::e_z()).unwrap(),
            0.0,
            epsilon = 1e-6
        );
    }

    #[test]
    fn max_bloch_psd_rejects_unphysical_t() {
        let t = CorrelationDiag::new(0.9, 0.9, 0.9);
        assert!(matches!(
            max_bloch_psd(&t, &BlochVector::e_z()),
            Err(PauliError::UnphysicalT)
        ));
    }

    #[test]
    fn octahedron_condition() {
        assert!(bell_diagonal_separable(&CorrelationDiag::new(0.5, 0.25, 0.25)));
        assert!(!bell_diagonal_separable(&CorrelationDiag::isotropic(-0.6)));
        assert!(bell_diagonal_separable(&CorrelationDiag::zero()));
    }

    #[test]
    fn validated_rejects_bad_matrices() {
        let mut non_herm = Matrix4::identity().scale(0.25);
        non_herm[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(
            DensityMatrix4::validated(non_herm),
            Err(PauliError::NonHermitian { .. })
        ));

        let bad_trace = Matrix4::identity().scale(0.3);
        assert!(matches!(
            DensityMatrix4::validated(bad_trace),
            Err(PauliError::NonUnitTrace { .. })
        ));

        let not_psd = reconstruct(&CanonicalState::bell_diagonal(CorrelationDiag::isotropic(
            0.9,
        )));
        assert!(matches!(
            DensityMatrix4::validated(*not_psd.matrix()),
            Err(PauliError::NotPositive { .. })
        ));
    }
}
