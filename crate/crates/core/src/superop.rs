//! Operators, density matrices, superoperators and Lindblad assembly.
//!
//! Vectorization is column stacking throughout: column `j` of a `d×d`
//! operator occupies slots `j*d .. j*d + d` of the vector. Under this rule
//! `A ρ B` maps to `(Bᵀ ⊗ A) vec(ρ)`.

use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{AdiaError, Result};
use crate::linalg::{self, c, dagger, kron, ONE, ZERO};

/// Default relative Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A dense `d×d` operator on the system Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct QOperator {
    mat: Array2<C64>,
}

impl QOperator {
    pub fn new(mat: Array2<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(AdiaError::DimensionMismatch {
                expected: mat.nrows(),
                found: mat.ncols(),
            });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(AdiaError::InvalidParameter("non-finite operator entry".into()));
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_matrix_unchecked(mat: Array2<C64>) -> Self {
        Self { mat }
    }

    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        let mut mat = Array2::zeros((d, d));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(AdiaError::DimensionMismatch { expected: d, found: row.len() });
            }
            for (j, v) in row.iter().enumerate() {
                mat[[i, j]] = c(*v);
            }
        }
        Self::new(mat)
    }

    pub fn zeros(d: usize) -> Self {
        Self { mat: Array2::zeros((d, d)) }
    }

    pub fn identity(d: usize) -> Self {
        Self { mat: linalg::eye(d) }
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &Array1<C64>, v: &Array1<C64>) -> Self {
        let d = u.len();
        let mut mat = Array2::zeros((d, v.len()));
        for i in 0..d {
            for j in 0..v.len() {
                mat[[i, j]] = u[i] * v[j].conj();
            }
        }
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.mat
    }

    pub fn dagger(&self) -> Self {
        Self { mat: dagger(&self.mat) }
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.mat)
    }

    pub fn scale(&self, z: C64) -> Self {
        Self { mat: self.mat.mapv(|x| x * z) }
    }

    /// `max|A − A†| / max|A|`, zero for the zero operator.
    pub fn hermiticity_defect(&self) -> f64 {
        let scale = linalg::max_abs(&self.mat);
        if scale == 0.0 {
            return 0.0;
        }
        linalg::max_hermiticity_defect(&self.mat) / scale
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > tol {
            Err(AdiaError::NonHermitianInput { defect })
        } else {
            Ok(())
        }
    }

    /// Eigenvalues (ascending) and eigenvectors of the Hermitian part.
    pub fn eigh(&self) -> Result<(Array1<f64>, Array2<C64>)> {
        linalg::eigh(&self.mat)
    }

    pub fn trace_norm(&self) -> f64 {
        linalg::trace_norm(&self.mat)
    }

    pub fn commutator(&self, other: &QOperator) -> QOperator {
        Self { mat: linalg::commutator(&self.mat, &other.mat) }
    }

    pub fn dot(&self, other: &QOperator) -> QOperator {
        Self { mat: self.mat.dot(&other.mat) }
    }
}

impl Add for &QOperator {
    type Output = QOperator;
    fn add(self, rhs: &QOperator) -> QOperator {
        QOperator { mat: &self.mat + &rhs.mat }
    }
}

impl Sub for &QOperator {
    type Output = QOperator;
    fn sub(self, rhs: &QOperator) -> QOperator {
        QOperator { mat: &self.mat - &rhs.mat }
    }
}

impl Mul<f64> for &QOperator {
    type Output = QOperator;
    fn mul(self, rhs: f64) -> QOperator {
        QOperator { mat: self.mat.mapv(|z| z * rhs) }
    }
}

/// Pauli matrices and ladder operators in the σᶻ basis (`|0⟩` = spin up).
pub mod pauli {
    use super::*;

    pub fn sx() -> QOperator {
        QOperator::from_matrix_unchecked(ndarray::array![[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sy() -> QOperator {
        QOperator::from_matrix_unchecked(ndarray::array![
            [ZERO, C64::new(0.0, -1.0)],
            [C64::new(0.0, 1.0), ZERO]
        ])
    }

    pub fn sz() -> QOperator {
        QOperator::from_matrix_unchecked(ndarray::array![[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `σ⁻ = |1⟩⟨0|`, lowers σᶻ.
    pub fn sigma_minus() -> QOperator {
        QOperator::from_matrix_unchecked(ndarray::array![[ZERO, ZERO], [ONE, ZERO]])
    }

    pub fn sigma_plus() -> QOperator {
        sigma_minus().dagger()
    }

    /// `m · σ`
    pub fn bloch(m: [f64; 3]) -> QOperator {
        let mut h = &(&sx() * m[0]) + &(&sy() * m[1]);
        h = &h + &(&sz() * m[2]);
        h
    }
}

/// A Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: QOperator,
}

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-10;
    pub const POSITIVITY_TOL: f64 = 1e-10;

    pub fn new(op: QOperator) -> Result<Self> {
        op.require_hermitian(1e-10)?;
        let tr = op.trace();
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(AdiaError::InvalidParameter(format!("density matrix trace {tr}")));
        }
        let (w, _) = op.eigh()?;
        if w[0] < -Self::POSITIVITY_TOL {
            return Err(AdiaError::InvalidParameter(format!(
                "density matrix eigenvalue {:.3e} is negative",
                w[0]
            )));
        }
        Ok(Self { op })
    }

    /// Normalizes trace and Hermiticity before validating.
    pub fn normalized(op: QOperator) -> Result<Self> {
        let tr = op.trace();
        if tr.norm() < 1e-300 {
            return Err(AdiaError::InvalidParameter("zero-trace operator".into()));
        }
        let m = linalg::hermitian_part(&op.mat.mapv(|z| z / tr));
        Self::new(QOperator { mat: m })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { op: QOperator::identity(d).scale(c(1.0 / d as f64)) }
    }

    pub fn op(&self) -> &QOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn purity(&self) -> f64 {
        self.op.dot(&self.op).trace().re
    }
}

/// Whether a generator acts on vectorized operators (`d²`) or, for the
/// shifted closed-system mode, directly on Hilbert-space vectors (`d`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StateSpace {
    #[default]
    Liouville,
    Hilbert,
}

/// Dense matrix acting on vectorized operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    mat: Array2<C64>,
    hilbert_dim: usize,
    space: StateSpace,
}

impl Superoperator {
    pub fn from_matrix(hilbert_dim: usize, mat: Array2<C64>) -> Result<Self> {
        Self::with_space(hilbert_dim, mat, StateSpace::Liouville)
    }

    pub fn with_space(hilbert_dim: usize, mat: Array2<C64>, space: StateSpace) -> Result<Self> {
        let n = match space {
            StateSpace::Liouville => hilbert_dim * hilbert_dim,
            StateSpace::Hilbert => hilbert_dim,
        };
        if mat.nrows() != n || mat.ncols() != n {
            return Err(AdiaError::DimensionMismatch { expected: n, found: mat.nrows() });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(AdiaError::InvalidParameter("non-finite superoperator entry".into()));
        }
        Ok(Self { mat, hilbert_dim, space })
    }

    /// Wraps a matrix of the same shape and space as `self`.
    pub fn like(&self, mat: Array2<C64>) -> Self {
        debug_assert_eq!(mat.dim(), self.mat.dim());
        Self { mat, hilbert_dim: self.hilbert_dim, space: self.space }
    }

    pub fn identity(d: usize) -> Self {
        Self { mat: linalg::eye(d * d), hilbert_dim: d, space: StateSpace::Liouville }
    }

    pub fn zeros(d: usize) -> Self {
        Self { mat: Array2::zeros((d * d, d * d)), hilbert_dim: d, space: StateSpace::Liouville }
    }

    pub fn identity_like(&self) -> Self {
        self.like(linalg::eye(self.size()))
    }

    pub fn zeros_like(&self) -> Self {
        self.like(Array2::zeros(self.mat.dim()))
    }

    /// Map `ρ ↦ A ρ B`.
    pub fn sandwich(a: &QOperator, b: &QOperator) -> Self {
        let d = a.dim();
        let bt = b.matrix().t().to_owned();
        Self { mat: kron(&bt, a.matrix()), hilbert_dim: d, space: StateSpace::Liouville }
    }

    pub fn left_mul(a: &QOperator) -> Self {
        Self::sandwich(a, &QOperator::identity(a.dim()))
    }

    pub fn right_mul(b: &QOperator) -> Self {
        Self::sandwich(&QOperator::identity(b.dim()), b)
    }

    pub fn dim(&self) -> usize {
        self.hilbert_dim
    }

    /// Side length of the matrix (`d²` in Liouville space).
    pub fn size(&self) -> usize {
        self.mat.nrows()
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.mat
    }

    pub fn dot(&self, rhs: &Superoperator) -> Superoperator {
        self.like(self.mat.dot(&rhs.mat))
    }

    pub fn scale(&self, z: f64) -> Superoperator {
        self.like(self.mat.mapv(|x| x * z))
    }

    pub fn scale_c(&self, z: C64) -> Superoperator {
        self.like(self.mat.mapv(|x| x * z))
    }

    pub fn commutator(&self, rhs: &Superoperator) -> Superoperator {
        self.like(linalg::commutator(&self.mat, &rhs.mat))
    }

    /// Hilbert–Schmidt adjoint (conjugate transpose of the matrix).
    pub fn adjoint(&self) -> Superoperator {
        self.like(dagger(&self.mat))
    }

    pub fn apply_vec(&self, v: &Array1<C64>) -> Array1<C64> {
        self.mat.dot(v)
    }

    pub fn apply(&self, x: &QOperator) -> QOperator {
        devectorize(&self.apply_vec(&vectorize(x)))
    }

    /// Spectral norm of the matrix.
    pub fn norm2(&self) -> f64 {
        linalg::norm2(&self.mat)
    }

    pub fn frobenius(&self) -> f64 {
        linalg::frobenius(&self.mat)
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.mat)
    }

    pub fn expm(&self, t: f64) -> Superoperator {
        self.like(linalg::expm(&self.mat.mapv(|z| z * t)))
    }

    /// `⟨1|` as a row vector, i.e. the trace functional; `None` outside
    /// Liouville space.
    pub fn trace_covector(&self) -> Option<Array1<C64>> {
        match self.space {
            StateSpace::Liouville => Some(vectorize(&QOperator::identity(self.hilbert_dim))),
            StateSpace::Hilbert => None,
        }
    }

    /// `‖⟨1| M‖` (Euclidean), the residual of trace annihilation.
    pub fn trace_annihilation_residual(&self) -> f64 {
        let one = match self.trace_covector() {
            Some(v) => v,
            None => return f64::NAN,
        };
        let row = one.dot(&self.mat);
        row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max ‖M(X) − M(X)†‖` over a fixed set of Hermitian test operators.
    pub fn hermiticity_preservation_defect(&self) -> f64 {
        let d = self.hilbert_dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in i..d {
                let mut re = Array2::zeros((d, d));
                re[[i, j]] = ONE;
                re[[j, i]] = ONE;
                let mut im = Array2::zeros((d, d));
                if i != j {
                    im[[i, j]] = C64::new(0.0, -1.0);
                    im[[j, i]] = C64::new(0.0, 1.0);
                }
                for x in [re, im] {
                    let y = self.apply(&QOperator::from_matrix_unchecked(x));
                    worst = worst.max(linalg::max_hermiticity_defect(y.matrix()));
                }
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.mat.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Add for &Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: &Superoperator) -> Superoperator {
        self.like(&self.mat + &rhs.mat)
    }
}

impl Sub for &Superoperator {
    type Output = Superoperator;
    fn sub(self, rhs: &Superoperator) -> Superoperator {
        self.like(&self.mat - &rhs.mat)
    }
}

impl Mul for &Superoperator {
    type Output = Superoperator;
    fn mul(self, rhs: &Superoperator) -> Superoperator {
        self.dot(rhs)
    }
}

impl Neg for &Superoperator {
    type Output = Superoperator;
    fn neg(self) -> Superoperator {
        self.like(-&self.mat)
    }
}

/// Column-stacked vector of `x`.
pub fn vectorize(x: &QOperator) -> Array1<C64> {
    let d = x.dim();
    let mut v = Array1::zeros(d * d);
    for j in 0..d {
        for i in 0..d {
            v[j * d + i] = x.mat[[i, j]];
        }
    }
    v
}

/// Inverse of [`vectorize`]. Panics if the length is not a perfect square.
pub fn devectorize(v: &Array1<C64>) -> QOperator {
    let d = (v.len() as f64).sqrt().round() as usize;
    assert_eq!(d * d, v.len(), "vector length {} is not a square", v.len());
    let mut mat = Array2::zeros((d, d));
    for j in 0..d {
        for i in 0..d {
            mat[[i, j]] = v[j * d + i];
        }
    }
    QOperator { mat }
}

/// `K = −i[H, ·]`.
pub fn hamiltonian_superop(h: &QOperator) -> Result<Superoperator> {
    hamiltonian_superop_tol(h, HERMITIAN_TOL)
}

pub fn hamiltonian_superop_tol(h: &QOperator, tol: f64) -> Result<Superoperator> {
    h.require_hermitian(tol)?;
    Ok(commutator_superop(h).scale_c(C64::new(0.0, -1.0)))
}

/// `X ↦ [A, X]` without any Hermiticity requirement.
pub fn commutator_superop(a: &QOperator) -> Superoperator {
    &Superoperator::left_mul(a) - &Superoperator::right_mul(a)
}

/// Single-operator dissipator `D[L]ρ = LρL† − ½{L†L, ρ}`.
pub fn dissipator_single(l: &QOperator) -> Superoperator {
    let ldl = l.dagger().dot(l);
    let jump = Superoperator::sandwich(l, &l.dagger());
    let anti = &Superoperator::left_mul(&ldl) + &Superoperator::right_mul(&ldl);
    &jump - &anti.scale(0.5)
}

/// `Σ_l D[L_l]`. An empty list yields the zero superoperator in dimension
/// `d`.
pub fn dissipator_superop(d: usize, lindblad_ops: &[QOperator]) -> Result<Superoperator> {
    let mut total = Superoperator::zeros(d);
    for l in lindblad_ops {
        if l.dim() != d {
            return Err(AdiaError::DimensionMismatch { expected: d, found: l.dim() });
        }
        total = &total + &dissipator_single(l);
    }
    Ok(total)
}

/// Derivative of `Σ_l D[L_l]` given `L_l` and `L_l'`.
pub fn dissipator_derivative(
    d: usize,
    ops: &[QOperator],
    dops: &[QOperator],
) -> Result<Superoperator> {
    if ops.len() != dops.len() {
        return Err(AdiaError::DimensionMismatch { expected: ops.len(), found: dops.len() });
    }
    let mut total = Superoperator::zeros(d);
    for (l, dl) in ops.iter().zip(dops) {
        if l.dim() != d || dl.dim() != d {
            return Err(AdiaError::DimensionMismatch { expected: d, found: l.dim().max(dl.dim()) });
        }
        let dldl = &dl.dagger().dot(l) + &l.dagger().dot(dl);
        let jump = &Superoperator::sandwich(dl, &l.dagger())
            + &Superoperator::sandwich(l, &dl.dagger());
        let anti = &Superoperator::left_mul(&dldl) + &Superoperator::right_mul(&dldl);
        total = &total + &(&jump - &anti.scale(0.5));
    }
    Ok(total)
}

/// `−i[H, ·] + Σ_l D[L_l]`.
pub fn lindbladian(h: &QOperator, lindblad_ops: &[QOperator]) -> Result<Superoperator> {
    let k = hamiltonian_superop(h)?;
    let dis = dissipator_superop(h.dim(), lindblad_ops)?;
    Ok(&k + &dis)
}

/// Choi matrix `J = Σ_ij |i⟩⟨j| ⊗ M(|i⟩⟨j|)`.
pub fn choi_matrix(m: &Superoperator) -> QOperator {
    debug_assert_eq!(m.space(), StateSpace::Liouville);
    let d = m.dim();
    let mut j = Array2::zeros((d * d, d * d));
    for i in 0..d {
        for jj in 0..d {
            let col = jj * d + i;
            for a in 0..d {
                for b in 0..d {
                    j[[i * d + a, jj * d + b]] = m.matrix()[[b * d + a, col]];
                }
            }
        }
    }
    QOperator { mat: j }
}

/// Outcome of a complete-positivity / trace-preservation check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CptpReport {
    /// `max(0, −λ_min(Choi))`
    pub cp_violation: f64,
    /// `‖⟨1|M − ⟨1|‖`
    pub tp_violation: f64,
    pub passed: bool,
}

pub fn is_cptp(m: &Superoperator, tol: f64) -> CptpReport {
    let choi = choi_matrix(m);
    let min_eig = linalg::eigh(choi.matrix()).map(|(w, _)| w[0]).unwrap_or(f64::NAN);
    let cp_violation = if min_eig.is_nan() { f64::INFINITY } else { (-min_eig).max(0.0) };
    let one = m.trace_covector().expect("CPTP check needs a Liouville-space map");
    let row = one.dot(m.matrix());
    let tp_violation = (&row - &one).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    CptpReport { cp_violation, tp_violation, passed: cp_violation <= tol && tp_violation <= tol }
}

/// Transpose map `X ↦ Xᵀ`, the standard positive but not completely
/// positive map.
pub fn transpose_map(d: usize) -> Superoperator {
    let mut m = Array2::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            // vec index of (i,j) is j*d+i, of (j,i) is i*d+j
            m[[i * d + j, j * d + i]] = ONE;
        }
    }
    Superoperator { mat: m, hilbert_dim: d, space: StateSpace::Liouville }
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;
    use proptest::prelude::*;

    fn sorted_eigs(m: &Superoperator) -> Vec<C64> {
        let mut w = linalg::eigvals(m.matrix()).unwrap().to_vec();
        w.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        w
    }

    #[test]
    fn vectorize_basis_and_identity() {
        let mut e00 = QOperator::zeros(2);
        e00.mat[[0, 0]] = ONE;
        let v = vectorize(&e00);
        assert_eq!(v.to_vec(), vec![ONE, ZERO, ZERO, ZERO]);
        let v = vectorize(&QOperator::identity(2));
        assert_eq!(v.to_vec(), vec![ONE, ZERO, ZERO, ONE]);
        // column stacking: (1,0) entry lands in slot 1
        let v = vectorize(&sigma_minus());
        assert_eq!(v[1], ONE);
    }

    #[test]
    fn hamiltonian_superop_sigma_z() {
        let k = hamiltonian_superop(&sz()).unwrap();
        let w = sorted_eigs(&k);
        let mut ims: Vec<f64> = w.iter().map(|z| z.im).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in ims.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(w.iter().all(|z| z.re.abs() < 1e-12));
    }

    #[test]
    fn hamiltonian_superop_zero() {
        let k = hamiltonian_superop(&QOperator::zeros(2)).unwrap();
        assert_eq!(k.max_abs(), 0.0);
    }

    #[test]
    fn hamiltonian_superop_bloch_vector() {
        let m = [1.0, 0.0, 1.0 / 150.0];
        let norm = (1.0f64 + 1.0 / 150.0f64.powi(2)).sqrt();
        let k = hamiltonian_superop(&bloch(m)).unwrap();
        let mut ims: Vec<f64> = sorted_eigs(&k).iter().map(|z| z.im).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want = [-2.0 * norm, 0.0, 0.0, 2.0 * norm];
        for (g, w) in ims.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
    }

    #[test]
    fn hamiltonian_superop_rejects_non_hermitian() {
        let err = hamiltonian_superop(&sigma_minus()).unwrap_err();
        assert!(matches!(err, AdiaError::NonHermitianInput { .. }));
    }

    #[test]
    fn hamiltonian_superop_anti_hermitian() {
        let k = hamiltonian_superop(&bloch([0.3, -0.7, 0.2])).unwrap();
        let s = &k + &k.adjoint();
        assert!(s.max_abs() < 1e-12);
    }

    #[test]
    fn amplitude_damping_spectrum() {
        // √(2γ) σ⁻ with γ = 1/2: eigenvalues {0, −2γ, −γ, −γ}
        let gamma = 0.5;
        let l = &sigma_minus() * (2.0 * gamma as f64).sqrt();
        let dis = dissipator_superop(2, &[l]).unwrap();
        let w = sorted_eigs(&dis);
        let want = [-2.0 * gamma, -gamma, -gamma, 0.0];
        for (g, w) in w.iter().zip(want) {
            assert!((g - c(w)).norm() < 1e-12, "{g} vs {w}");
        }
    }

    #[test]
    fn empty_dissipator_is_zero() {
        assert_eq!(dissipator_superop(3, &[]).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn dissipator_dimension_mismatch() {
        let err = dissipator_superop(3, &[sx()]).unwrap_err();
        assert_eq!(err, AdiaError::DimensionMismatch { expected: 3, found: 2 });
    }

    #[test]
    fn choi_of_identity_and_transpose() {
        let j = choi_matrix(&Superoperator::identity(2));
        let (w, _) = j.eigh().unwrap();
        let want = [0.0, 0.0, 0.0, 2.0];
        for (g, w) in w.iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
        let report = is_cptp(&transpose_map(2), 1e-8);
        assert!(report.cp_violation > 0.5);
        assert!(report.tp_violation < 1e-12);
        assert!(!report.passed);
    }

    #[test]
    fn amplitude_damping_channel_is_cptp() {
        let l = &sigma_minus() * 1.0;
        let gen = dissipator_superop(2, &[l]).unwrap();
        for t in [1e-3, 0.1, 1.0, 10.0] {
            let report = is_cptp(&gen.expm(t), 1e-8);
            assert!(report.passed, "{report:?}");
        }
    }

    fn arb_op(d: usize) -> impl Strategy<Value = QOperator> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d).prop_map(move |v| {
            let mat = Array2::from_shape_vec(
                (d, d),
                v.into_iter().map(|(a, b)| C64::new(a, b)).collect(),
            )
            .unwrap();
            QOperator::new(mat).unwrap()
        })
    }

    fn arb_hermitian(d: usize) -> impl Strategy<Value = QOperator> {
        arb_op(d).prop_map(|a| QOperator::from_matrix_unchecked(linalg::hermitian_part(a.matrix())))
    }

    proptest! {
        #[test]
        fn vectorize_roundtrip_and_norm(x in arb_op(3)) {
            let v = vectorize(&x);
            prop_assert_eq!(devectorize(&v), x.clone());
            let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!((nv - linalg::frobenius(x.matrix())).abs() < 1e-12);
        }

        #[test]
        fn sandwich_matches_products(a in arb_op(2), b in arb_op(2), x in arb_op(2)) {
            let direct = a.dot(&x).dot(&b.dagger());
            let via = Superoperator::sandwich(&a, &b.dagger()).apply(&x);
            prop_assert!(linalg::max_abs(&(direct.matrix() - via.matrix())) < 1e-12);
        }

        #[test]
        fn lindbladian_annihilates_trace(h in arb_hermitian(2), l1 in arb_op(2), l2 in arb_op(2)) {
            let gen = lindbladian(&h, &[l1, l2]).unwrap();
            prop_assert!(gen.trace_annihilation_residual() < 1e-12);
            prop_assert!(gen.hermiticity_preservation_defect() < 1e-12);
            for step in [1e-3, 1e-2, 1e-1] {
                let report = is_cptp(&gen.expm(step), 1e-8);
                prop_assert!(report.passed, "{:?}", report);
            }
        }
    }
}
