//! Eigenstructure of generators: spectral projectors, the zero-eigenvalue
//! projector `P`, gap, reduced resolvent `S`, and their `s`-derivatives.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{AdiaError, Result};
use crate::family::{check_unit_interval, LiouvillianFamily};
use crate::linalg::{self, dagger};
use crate::superop::Superoperator;

/// Numerical thresholds for spectral analysis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    /// Eigenvalues with `|λ| ≤ zero_tol · ρ(M)` belong to the kernel.
    pub zero_tol: f64,
    /// Eigenvalues closer than `cluster_tol · ρ(M)` are merged.
    pub cluster_tol: f64,
    /// Allowed relative residual `‖M − Σ λ_j P_j‖ / ρ(M)`.
    pub residual_tol: f64,
    /// Absolute gap below which `P'`, `S'` are refused.
    pub gap_threshold: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self { zero_tol: 1e-10, cluster_tol: 1e-8, residual_tol: 1e-6, gap_threshold: 1e-9 }
    }
}

/// One group of (numerically) equal eigenvalues with its spectral projector.
#[derive(Clone, Debug)]
pub struct EigenCluster {
    pub value: C64,
    pub multiplicity: usize,
    pub projector: Superoperator,
}

#[derive(Clone, Debug)]
pub struct SpectralData {
    pub eigenvalues: Array1<C64>,
    /// Right eigenvectors as columns.
    pub right_vectors: Array2<C64>,
    /// Left eigenvectors as rows, normalized so that `left · right = 1`.
    pub left_vectors: Array2<C64>,
    pub clusters: Vec<EigenCluster>,
    /// Index of the zero cluster in `clusters`, if any.
    pub zero_cluster: Option<usize>,
    /// Spectral radius used to scale the tolerances.
    pub scale: f64,
    /// `‖M − Σ λ_j P_j‖₂`
    pub residual: f64,
}

impl SpectralData {
    pub fn zero_multiplicity(&self) -> usize {
        self.zero_cluster.map(|i| self.clusters[i].multiplicity).unwrap_or(0)
    }

    /// Smallest modulus among non-zero clusters; `+∞` if there are none.
    pub fn gap(&self) -> f64 {
        self.clusters
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != self.zero_cluster)
            .map(|(_, c)| c.value.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

fn spectral_radius(w: &Array1<C64>) -> f64 {
    w.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Groups eigenvalue indices: the kernel first (if any), then clusters of
/// mutually close eigenvalues.
fn cluster_indices(w: &Array1<C64>, scale: f64, cfg: &SpectralConfig) -> (Vec<Vec<usize>>, Option<usize>) {
    let n = w.len();
    let zero_cut = cfg.zero_tol * scale;
    let merge_cut = cfg.cluster_tol * scale;
    let mut assigned = vec![false; n];
    let mut groups = Vec::new();
    let zero: Vec<usize> = (0..n).filter(|&i| scale == 0.0 || w[i].norm() <= zero_cut).collect();
    let zero_idx = if zero.is_empty() {
        None
    } else {
        for &i in &zero {
            assigned[i] = true;
        }
        groups.push(zero);
        Some(0)
    };
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        assigned[i] = true;
        let mut grp = vec![i];
        // transitive closure under the merge threshold
        let mut k = 0;
        while k < grp.len() {
            let anchor = w[grp[k]];
            for j in 0..n {
                if !assigned[j] && (w[j] - anchor).norm() <= merge_cut {
                    assigned[j] = true;
                    grp.push(j);
                }
            }
            k += 1;
        }
        groups.push(grp);
    }
    (groups, zero_idx)
}

/// Full eigen-decomposition with clustered, biorthonormal spectral
/// projectors.
pub fn decompose(m: &Superoperator, zero_tol: f64) -> Result<SpectralData> {
    decompose_with(m, &SpectralConfig { zero_tol, ..Default::default() })
}

pub fn decompose_with(m: &Superoperator, cfg: &SpectralConfig) -> Result<SpectralData> {
    let n = m.size();
    let (w, r) = linalg::eig(m.matrix())?;
    let scale = spectral_radius(&w);
    let left = linalg::inv(&r).map_err(|_| AdiaError::DefectiveMatrix { residual: f64::INFINITY })?;
    let (groups, zero_cluster) = cluster_indices(&w, scale, cfg);
    let mut clusters = Vec::with_capacity(groups.len());
    let mut recon = Array2::<C64>::zeros((n, n));
    for (gi, grp) in groups.iter().enumerate() {
        let mut p = Array2::<C64>::zeros((n, n));
        for &i in grp {
            let col = r.slice(s![.., i]);
            let row = left.slice(s![i, ..]);
            for a in 0..n {
                let ca = col[a];
                for b in 0..n {
                    p[[a, b]] += ca * row[b];
                }
            }
        }
        let value = if Some(gi) == zero_cluster {
            C64::new(0.0, 0.0)
        } else {
            grp.iter().map(|&i| w[i]).sum::<C64>() / grp.len() as f64
        };
        recon.scaled_add(value, &p);
        clusters.push(EigenCluster { value, multiplicity: grp.len(), projector: m.like(p) });
    }
    let residual = linalg::norm2(&(m.matrix() - &recon));
    if !(residual <= cfg.residual_tol * scale.max(f64::MIN_POSITIVE)) && scale > 0.0 {
        return Err(AdiaError::DefectiveMatrix { residual });
    }
    Ok(SpectralData {
        eigenvalues: w,
        right_vectors: r,
        left_vectors: left,
        clusters,
        zero_cluster,
        scale,
        residual,
    })
}

/// Number of eigenvalues with `|λ| ≤ zero_tol · ρ(M)`.
pub fn zero_multiplicity(m: &Superoperator, zero_tol: f64) -> Result<usize> {
    let w = linalg::eigvals(m.matrix())?;
    let scale = spectral_radius(&w);
    Ok(w.iter().filter(|z| scale == 0.0 || z.norm() <= zero_tol * scale).count())
}

/// Spectral projector onto the zero eigenvalue.
///
/// Built from the right null space of `M` and the left null space (null
/// space of `M†`) as `R (L†R)⁻¹ L†`. This does not touch the non-zero part
/// of the spectrum, so it stays accurate when other eigenvalues are nearly
/// defective.
pub fn zero_projector(m: &Superoperator, zero_tol: f64) -> Result<Superoperator> {
    let k = zero_multiplicity(m, zero_tol)?;
    if k == 0 {
        return Err(AdiaError::EmptyKernel);
    }
    projector_from_null_spaces(m, k)
}

pub(crate) fn projector_from_null_spaces(m: &Superoperator, k: usize) -> Result<Superoperator> {
    let p = projector_from(m.matrix(), k)?;
    if let Some(p) = p {
        return Ok(m.like(p));
    }
    // Nilpotent zero block: the kernel is smaller than the algebraic
    // multiplicity, so use the generalized kernel of M^k instead.
    let mut mk = m.matrix().clone();
    for _ in 1..k {
        mk = mk.dot(m.matrix());
    }
    match projector_from(&mk, k)? {
        Some(p) => Ok(m.like(p)),
        None => Err(AdiaError::ProjectorFailure {
            s: f64::NAN,
            reason: "left and right null spaces do not pair".into(),
        }),
    }
}

fn projector_from(a: &Array2<C64>, k: usize) -> Result<Option<Array2<C64>>> {
    let r = linalg::null_space(a, k)?;
    let l = linalg::null_space(&dagger(a), k)?;
    let ldr = dagger(&l).dot(&r);
    if linalg::inverse_condition(&ldr)? < 1e-8 {
        return Ok(None);
    }
    let inv = linalg::inv(&ldr)?;
    Ok(Some(r.dot(&inv).dot(&dagger(&l))))
}

/// `‖M P‖₂`. For a semisimple zero eigenvalue this vanishes; a nilpotent
/// part `D` of the zero block shows up as `‖D‖`.
pub fn semisimplicity_defect(m: &Superoperator, p: &Superoperator) -> f64 {
    m.dot(p).norm2()
}

/// Reduced resolvent `S = (M + P)⁻¹ − P`.
pub fn reduced_resolvent(m: &Superoperator, p: &Superoperator) -> Result<Superoperator> {
    let shifted = m + p;
    let rcond = linalg::inverse_condition(shifted.matrix())?;
    if rcond < 1e-14 {
        return Err(AdiaError::SingularShift { rcond });
    }
    let inv = linalg::inv(shifted.matrix())?;
    Ok(m.like(inv - p.matrix()))
}

/// Gap and kernel diagnostics at one schedule point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub s: f64,
    pub gap: f64,
    pub zero_multiplicity: usize,
    pub semisimple_defect: f64,
}

/// Gap from the eigenvalues alone (no projector reconstruction), so it is
/// usable at near-defective points such as exceptional points.
pub fn gap_report(m: &Superoperator, s: f64, cfg: &SpectralConfig) -> Result<GapReport> {
    let w = linalg::eigvals(m.matrix())?;
    let scale = spectral_radius(&w);
    let cut = cfg.zero_tol * scale;
    let zero_multiplicity = w.iter().filter(|z| scale == 0.0 || z.norm() <= cut).count();
    let gap = w
        .iter()
        .filter(|z| !(scale == 0.0 || z.norm() <= cut))
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    let semisimple_defect = if zero_multiplicity > 0 {
        let p = projector_from_null_spaces(m, zero_multiplicity)?;
        semisimplicity_defect(m, &p)
    } else {
        0.0
    };
    Ok(GapReport { s, gap, zero_multiplicity, semisimple_defect })
}

/// Everything needed for derivative formulas at one point.
#[derive(Clone, Debug)]
pub struct PointAnalysis {
    pub s: f64,
    pub generator: Superoperator,
    pub projector: Superoperator,
    pub resolvent: Superoperator,
    pub gap: f64,
    pub zero_multiplicity: usize,
}

pub fn analyze(family: &dyn LiouvillianFamily, s: f64, cfg: &SpectralConfig) -> Result<PointAnalysis> {
    check_unit_interval(s)?;
    let generator = family.generator(s)?;
    let report = gap_report(&generator, s, cfg)?;
    if report.zero_multiplicity == 0 {
        return Err(AdiaError::EmptyKernel);
    }
    let projector = projector_from_null_spaces(&generator, report.zero_multiplicity)?;
    let resolvent = reduced_resolvent(&generator, &projector)?;
    Ok(PointAnalysis {
        s,
        generator,
        projector,
        resolvent,
        gap: report.gap,
        zero_multiplicity: report.zero_multiplicity,
    })
}

/// How a derivative should be obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DerivativeScheme {
    /// Analytic when the family provides it, otherwise central differences
    /// with `h = 1e-5`.
    Auto,
    Analytic,
    Central { h: f64 },
}

impl Default for DerivativeScheme {
    fn default() -> Self {
        DerivativeScheme::Auto
    }
}

/// Which finite-difference stencil was used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    Analytic,
    Central,
    /// `s − h` fell outside `[0, 1]`.
    Forward,
    /// `s + h` fell outside `[0, 1]`.
    Backward,
}

pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Second-order finite difference of `f` at `s`, one-sided at the edges of
/// the unit interval.
pub fn finite_difference<F>(f: F, s: f64, h: f64) -> Result<(Superoperator, Stencil)>
where
    F: Fn(f64) -> Result<Superoperator>,
{
    if s - h >= 0.0 && s + h <= 1.0 {
        let d = &f(s + h)? - &f(s - h)?;
        Ok((d.scale(0.5 / h), Stencil::Central))
    } else if s - h < 0.0 {
        let (f0, f1, f2) = (f(s)?, f(s + h)?, f(s + 2.0 * h)?);
        let d = &(&f1.scale(4.0) - &f0.scale(3.0)) - &f2;
        Ok((d.scale(0.5 / h), Stencil::Forward))
    } else {
        let (f0, f1, f2) = (f(s)?, f(s - h)?, f(s - 2.0 * h)?);
        let d = &(&f0.scale(3.0) - &f1.scale(4.0)) + &f2;
        Ok((d.scale(0.5 / h), Stencil::Backward))
    }
}

/// `L'(s)` together with the stencil that produced it.
pub fn liouvillian_derivative(
    family: &dyn LiouvillianFamily,
    s: f64,
    scheme: DerivativeScheme,
) -> Result<(Superoperator, Stencil)> {
    check_unit_interval(s)?;
    match scheme {
        DerivativeScheme::Analytic | DerivativeScheme::Auto => {
            if let Some(d) = family.generator_derivative(s) {
                return Ok((d?, Stencil::Analytic));
            }
            if scheme == DerivativeScheme::Analytic {
                return Err(AdiaError::InvalidParameter(format!(
                    "family {} has no analytic derivative",
                    family.name()
                )));
            }
            finite_difference(|x| family.generator(x), s, DEFAULT_FD_STEP)
        }
        DerivativeScheme::Central { h } => finite_difference(|x| family.generator(x), s, h),
    }
}

fn require_gap(a: &PointAnalysis, cfg: &SpectralConfig) -> Result<()> {
    if a.gap < cfg.gap_threshold {
        Err(AdiaError::GapTooSmall { s: a.s, gap: a.gap, threshold: cfg.gap_threshold })
    } else {
        Ok(())
    }
}

/// `P' = −P L' S − S L' P`
pub fn projector_derivative_at(a: &PointAnalysis, dl: &Superoperator) -> Superoperator {
    let t1 = a.projector.dot(dl).dot(&a.resolvent);
    let t2 = a.resolvent.dot(dl).dot(&a.projector);
    -&(&t1 + &t2)
}

/// `S' = S² L' P + P L' S² − S L' S`
pub fn resolvent_derivative_at(a: &PointAnalysis, dl: &Superoperator) -> Superoperator {
    let s2 = a.resolvent.dot(&a.resolvent);
    let t1 = s2.dot(dl).dot(&a.projector);
    let t2 = a.projector.dot(dl).dot(&s2);
    let t3 = a.resolvent.dot(dl).dot(&a.resolvent);
    &(&t1 + &t2) - &t3
}

pub fn projector_derivative(
    family: &dyn LiouvillianFamily,
    s: f64,
    cfg: &SpectralConfig,
) -> Result<Superoperator> {
    let a = analyze(family, s, cfg)?;
    require_gap(&a, cfg)?;
    let (dl, _) = liouvillian_derivative(family, s, DerivativeScheme::Auto)?;
    Ok(projector_derivative_at(&a, &dl))
}

pub fn resolvent_derivative(
    family: &dyn LiouvillianFamily,
    s: f64,
    cfg: &SpectralConfig,
) -> Result<Superoperator> {
    let a = analyze(family, s, cfg)?;
    require_gap(&a, cfg)?;
    let (dl, _) = liouvillian_derivative(family, s, DerivativeScheme::Auto)?;
    Ok(resolvent_derivative_at(&a, &dl))
}

pub const MAX_X_ORDER: usize = 3;

/// Finite-difference step used for `X_n'`: `1e-4 · 10^{(n−1)/2}`.
pub fn x_step(n: usize) -> f64 {
    1e-4 * 10f64.powf((n as f64 - 1.0) / 2.0)
}

fn x_order(family: &dyn LiouvillianFamily, s: f64, n: usize, cfg: &SpectralConfig) -> Result<Superoperator> {
    let a = analyze(family, s, cfg)?;
    require_gap(&a, cfg)?;
    if n == 1 {
        return Ok(a.resolvent);
    }
    let h = x_step(n - 1);
    let (dx, _) = finite_difference(|x| x_order(family, x, n - 1, cfg), s, h)?;
    Ok(a.resolvent.dot(&dx))
}

/// `[X₁, …, X_m]` with `X₁ = S`, `X_{n+1} = S X_n'`.
pub fn x_sequence(
    family: &dyn LiouvillianFamily,
    s: f64,
    m: usize,
    cfg: &SpectralConfig,
) -> Result<Vec<Superoperator>> {
    if m > MAX_X_ORDER {
        return Err(AdiaError::OrderTooHigh { requested: m, max: MAX_X_ORDER });
    }
    (1..=m).map(|n| x_order(family, s, n, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::superop::{dissipator_superop, hamiltonian_superop, pauli};
    use ndarray::Array2;

    fn amplitude_damping() -> Superoperator {
        dissipator_superop(2, &[&pauli::sigma_minus() * 1.0]).unwrap()
    }

    /// Σ_{j≠0} P_j / λ_j, the eigenprojector form of the reduced resolvent.
    fn resolvent_from_projectors(sd: &SpectralData) -> Array2<C64> {
        let n = sd.right_vectors.nrows();
        let mut out = Array2::zeros((n, n));
        for (i, cl) in sd.clusters.iter().enumerate() {
            if Some(i) != sd.zero_cluster {
                out.scaled_add(C64::new(1.0, 0.0) / cl.value, cl.projector.matrix());
            }
        }
        out
    }

    #[test]
    fn decompose_amplitude_damping_clusters() {
        let sd = decompose(&amplitude_damping(), 1e-10).unwrap();
        let mut vals: Vec<(f64, usize)> =
            sd.clusters.iter().map(|c| (c.value.re, c.multiplicity)).collect();
        vals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        assert_eq!(vals.len(), 3);
        assert!((vals[0].0 + 1.0).abs() < 1e-12 && vals[0].1 == 1);
        assert!((vals[1].0 + 0.5).abs() < 1e-12 && vals[1].1 == 2);
        assert!(vals[2].0.abs() < 1e-12 && vals[2].1 == 1);
        let total = sd.clusters.iter().fold(Array2::<C64>::zeros((4, 4)), |acc, c| acc + c.projector.matrix());
        assert!(linalg::max_abs(&(total - linalg::eye(4))) < 1e-9);
        assert!((sd.gap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn decompose_zero_superoperator() {
        let sd = decompose(&Superoperator::zeros(2), 1e-10).unwrap();
        assert_eq!(sd.clusters.len(), 1);
        assert_eq!(sd.zero_multiplicity(), 4);
        let p = zero_projector(&Superoperator::zeros(2), 1e-10).unwrap();
        assert!(linalg::max_abs(&(p.matrix() - linalg::eye(4))) < 1e-12);
    }

    #[test]
    fn jordan_block_is_reported() {
        let mut j = Array2::<C64>::zeros((4, 4));
        j[[0, 1]] = c(1.0);
        j[[2, 2]] = c(-1.0);
        j[[3, 3]] = c(-2.0);
        let m = Superoperator::from_matrix(2, j).unwrap();
        let p = zero_projector(&m, 1e-10).unwrap();
        assert!((semisimplicity_defect(&m, &p) - 1.0).abs() < 1e-12);

        let mut nz = Array2::<C64>::zeros((4, 4));
        nz[[0, 0]] = c(-1.0);
        nz[[0, 1]] = c(1.0);
        nz[[1, 1]] = c(-1.0);
        nz[[3, 3]] = c(-2.0);
        let m = Superoperator::from_matrix(2, nz).unwrap();
        assert!(matches!(decompose(&m, 1e-10), Err(AdiaError::DefectiveMatrix { .. })));
    }

    #[test]
    fn commutator_kernel_has_rank_two() {
        let k = hamiltonian_superop(&pauli::sz()).unwrap();
        let p = zero_projector(&k, 1e-10).unwrap();
        let tr: C64 = p.matrix().diag().sum();
        assert!((tr - c(2.0)).norm() < 1e-12);
        assert!(semisimplicity_defect(&k, &p) < 1e-12);
    }

    #[test]
    fn empty_kernel() {
        let m = Superoperator::from_matrix(2, linalg::eye(4).mapv(|z| -z)).unwrap();
        assert_eq!(zero_projector(&m, 1e-10).unwrap_err(), AdiaError::EmptyKernel);
    }

    #[test]
    fn diagonal_reduced_resolvent() {
        let mut d = Array2::<C64>::zeros((4, 4));
        for (i, v) in [0.0, -1.0, -2.0, -2.0].iter().enumerate() {
            d[[i, i]] = c(*v);
        }
        let m = Superoperator::from_matrix(2, d).unwrap();
        let mut p = Array2::<C64>::zeros((4, 4));
        p[[0, 0]] = c(1.0);
        let p = m.like(p);
        let s = reduced_resolvent(&m, &p).unwrap();
        for (i, v) in [0.0, -1.0, -0.5, -0.5].iter().enumerate() {
            assert!((s.matrix()[[i, i]] - c(*v)).norm() < 1e-14);
        }
    }

    #[test]
    fn resolvent_matches_projector_sum() {
        let gen = amplitude_damping();
        let sd = decompose(&gen, 1e-10).unwrap();
        let p = zero_projector(&gen, 1e-10).unwrap();
        let s = reduced_resolvent(&gen, &p).unwrap();
        let oracle = resolvent_from_projectors(&sd);
        assert!(linalg::max_abs(&(s.matrix() - &oracle)) < 1e-8 * linalg::max_abs(&oracle));
        // S M = Q, S P = 0
        let q = &p.identity_like() - &p;
        assert!((&s.dot(&gen) - &q).max_abs() < 1e-9);
        assert!(s.dot(&p).max_abs() < 1e-9);
        assert!(p.dot(&s).max_abs() < 1e-9);
    }

    #[test]
    fn singular_shift_detected() {
        // a second eigenvalue at zero that the projector does not cover
        let mut d = Array2::<C64>::zeros((4, 4));
        d[[2, 2]] = c(-1.0);
        d[[3, 3]] = c(-1.0);
        let m = Superoperator::from_matrix(2, d).unwrap();
        let mut p = Array2::<C64>::zeros((4, 4));
        p[[0, 0]] = c(1.0);
        let err = reduced_resolvent(&m, &m.like(p)).unwrap_err();
        assert!(matches!(err, AdiaError::SingularShift { .. }));
    }

    #[test]
    fn x_order_limit() {
        struct Const(Superoperator);
        impl LiouvillianFamily for Const {
            fn name(&self) -> &str {
                "const"
            }
            fn hilbert_dim(&self) -> usize {
                2
            }
            fn params(&self) -> serde_json::Value {
                serde_json::Value::Null
            }
            fn generator(&self, _s: f64) -> Result<Superoperator> {
                Ok(self.0.clone())
            }
        }
        let f = Const(amplitude_damping());
        let cfg = SpectralConfig::default();
        let xs = x_sequence(&f, 0.5, 1, &cfg).unwrap();
        let a = analyze(&f, 0.5, &cfg).unwrap();
        assert_eq!(xs[0], a.resolvent);
        assert!(matches!(x_sequence(&f, 0.5, 4, &cfg), Err(AdiaError::OrderTooHigh { .. })));
        let xs = x_sequence(&f, 0.5, 3, &cfg).unwrap();
        assert!(xs[1].max_abs() < 1e-12 && xs[2].max_abs() < 1e-12);
    }
}
