//! Thermal (Davies) generators: Bohr decomposition of the coupling, KMS
//! rates, Lamb shift, Gibbs state and detailed-balance certificates.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{AdiaError, Result};
use crate::linalg::{self, c, dagger};
use crate::quadrature::{integrate, QuadConfig};
use crate::superop::{
    dissipator_single, hamiltonian_superop_tol, vectorize, DensityMatrix, QOperator,
    Superoperator,
};

/// Bath spectral density `γ(ω)` (positive ω lowers the system energy).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SpectralFunction {
    /// `γ(ω) = η ω e^{−|ω|/ω_c} / (1 − e^{−βω})`, with `γ(0) = η/β`.
    OhmicExpCutoff { strength: f64, cutoff: f64 },
    /// `γ(ω) = rate` for all ω. Violates KMS unless β = 0.
    Flat { rate: f64 },
    /// Piecewise-linear interpolation of samples; zero outside the table.
    Tabulated { omega: Vec<f64>, gamma: Vec<f64> },
}

impl SpectralFunction {
    /// The ohmic density with `η = 2π`, `ω_c = 8π`.
    pub fn reference_ohmic() -> Self {
        SpectralFunction::OhmicExpCutoff {
            strength: 2.0 * std::f64::consts::PI,
            cutoff: 8.0 * std::f64::consts::PI,
        }
    }

    pub fn validate(&self, beta: f64) -> Result<()> {
        match self {
            SpectralFunction::OhmicExpCutoff { strength, cutoff } => {
                if !(*strength >= 0.0 && *cutoff > 0.0 && beta > 0.0) {
                    return Err(AdiaError::InvalidParameter(
                        "ohmic bath needs strength ≥ 0, cutoff > 0, beta > 0".into(),
                    ));
                }
            }
            SpectralFunction::Flat { rate } => {
                if !(*rate >= 0.0) {
                    return Err(AdiaError::InvalidParameter("flat bath rate must be ≥ 0".into()));
                }
            }
            SpectralFunction::Tabulated { omega, gamma } => {
                if omega.len() != gamma.len() || omega.len() < 2 {
                    return Err(AdiaError::InvalidParameter(
                        "tabulated bath needs ≥ 2 matching samples".into(),
                    ));
                }
                if omega.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(AdiaError::InvalidParameter(
                        "tabulated frequencies must be strictly increasing".into(),
                    ));
                }
                if gamma.iter().any(|g| !(*g >= 0.0)) {
                    return Err(AdiaError::InvalidParameter("tabulated rates must be ≥ 0".into()));
                }
            }
        }
        Ok(())
    }

    pub fn rate(&self, omega: f64, beta: f64) -> f64 {
        match self {
            SpectralFunction::OhmicExpCutoff { strength, cutoff } => {
                let w = omega.abs();
                if w == 0.0 {
                    return strength / beta;
                }
                let up = strength * w * (-w / cutoff).exp() / -(-beta * w).exp_m1();
                if omega > 0.0 {
                    up
                } else {
                    up * (-beta * w).exp()
                }
            }
            SpectralFunction::Flat { rate } => *rate,
            SpectralFunction::Tabulated { omega: xs, gamma: ys } => {
                if omega < xs[0] || omega > xs[xs.len() - 1] {
                    return 0.0;
                }
                let k = xs.partition_point(|&x| x <= omega).clamp(1, xs.len() - 1);
                let t = (omega - xs[k - 1]) / (xs[k] - xs[k - 1]);
                ys[k - 1] + t * (ys[k] - ys[k - 1])
            }
        }
    }

    /// Principal value `S(ω) = P∫ γ(ω')/(ω − ω') dω'`, folded onto `t > 0` as
    /// `∫₀^∞ [γ(ω − t) − γ(ω + t)]/t dt`. Returns (value, error estimate).
    pub fn lamb_shift(&self, omega: f64, beta: f64, tol: f64) -> Result<(f64, f64)> {
        let (upper, mut breaks) = match self {
            SpectralFunction::Flat { .. } => return Ok((0.0, 0.0)),
            SpectralFunction::OhmicExpCutoff { cutoff, .. } => {
                let w = omega.abs();
                let pts = (0..8).map(|k| w + cutoff * (1 << k) as f64 * 0.5).collect::<Vec<_>>();
                (w + 80.0 * cutoff, [vec![w], pts].concat())
            }
            SpectralFunction::Tabulated { omega: xs, .. } => {
                let upper = (omega - xs[0]).abs().max((xs[xs.len() - 1] - omega).abs());
                (upper, xs.iter().map(|x| (x - omega).abs()).collect())
            }
        };
        breaks.retain(|&b| b > 0.0 && b < upper);
        let cfg = QuadConfig { abs_tol: 0.1 * tol, rel_tol: 0.1 * tol, max_intervals: 4000 };
        let f = |t: f64| (self.rate(omega - t, beta) - self.rate(omega + t, beta)) / t;
        let q = integrate(f, 0.0, upper, &breaks, &cfg)?;
        let target = tol * q.value.abs().max(1.0);
        if q.error > target {
            return Err(AdiaError::QuadratureFailure { estimate: q.error, tolerance: target });
        }
        Ok((q.value, q.error))
    }
}

/// How the ω = 0 Bohr component enters the dissipator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroFrequency {
    /// One jump operator `Π_a A Π_a` per energy level.
    #[default]
    PerLevel,
    /// A single jump operator `A₀ = Σ_a Π_a A Π_a`.
    Grouped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub beta: f64,
    pub spectral: SpectralFunction,
    #[serde(default = "default_true")]
    pub lamb_shift: bool,
    #[serde(default)]
    pub zero_frequency: ZeroFrequency,
    /// Relative tolerance for the principal-value quadrature.
    #[serde(default = "default_pv_tol")]
    pub pv_tolerance: f64,
}

fn default_true() -> bool {
    true
}

fn default_pv_tol() -> f64 {
    1e-8
}

impl BathSpec {
    pub fn new(beta: f64, spectral: SpectralFunction) -> Self {
        Self {
            beta,
            spectral,
            lamb_shift: true,
            zero_frequency: ZeroFrequency::PerLevel,
            pv_tolerance: default_pv_tol(),
        }
    }

    pub fn gamma(&self, omega: f64) -> f64 {
        self.spectral.rate(omega, self.beta)
    }

    pub fn lamb_shift_coefficient(&self, omega: f64) -> Result<f64> {
        Ok(self.spectral.lamb_shift(omega, self.beta, self.pv_tolerance)?.0)
    }

    /// `max_ω |γ(−ω) − e^{−βω} γ(ω)| / γ(ω)` over the given frequencies.
    pub fn kms_violation(&self, omegas: &[f64]) -> f64 {
        omegas
            .iter()
            .map(|&w| {
                let (hi, lo) = (self.gamma(w.abs()), self.gamma(-w.abs()));
                let expected = (-self.beta * w.abs()).exp() * hi;
                if hi == 0.0 {
                    lo.abs()
                } else {
                    (lo - expected).abs() / hi
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Lamb-shift coefficient `S(ω)` for a bath.
pub fn lamb_shift_coefficient(bath: &BathSpec, omega: f64) -> Result<f64> {
    bath.lamb_shift_coefficient(omega)
}

/// Chebyshev interpolant of a smooth function on `[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevTable {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

impl ChebyshevTable {
    pub fn fit<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, n: usize) -> Result<Self> {
        let n = n.max(1);
        let vals = (0..n)
            .map(|k| {
                let x = (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos();
                f(0.5 * (a + b) + 0.5 * (b - a) * x)
            })
            .collect::<Result<Vec<_>>>()?;
        let coeffs = (0..n)
            .map(|j| {
                let s: f64 = (0..n)
                    .map(|k| {
                        vals[k] * (std::f64::consts::PI * j as f64 * (k as f64 + 0.5) / n as f64).cos()
                    })
                    .sum();
                s * 2.0 / n as f64
            })
            .collect();
        Ok(Self { a, b, coeffs })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a.min(self.b) - 1e-12 && x <= self.a.max(self.b) + 1e-12
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = if self.b == self.a { 0.0 } else { (2.0 * x - self.a - self.b) / (self.b - self.a) };
        let (mut b1, mut b2) = (0.0, 0.0);
        for &ck in self.coeffs.iter().skip(1).rev() {
            let tmp = 2.0 * t * b1 - b2 + ck;
            b2 = b1;
            b1 = tmp;
        }
        t * b1 - b2 + 0.5 * self.coeffs[0]
    }

    /// Magnitude of the trailing coefficients, a proxy for the fit error.
    pub fn tail(&self) -> f64 {
        self.coeffs.iter().rev().take(3).map(|c| c.abs()).fold(0.0, f64::max)
    }
}

/// Lamb-shift coefficients evaluated from cached interpolants where
/// possible and by quadrature otherwise.
#[derive(Clone, Debug)]
pub struct LambShiftCache {
    bath: BathSpec,
    at_zero: f64,
    tables: Vec<ChebyshevTable>,
}

impl LambShiftCache {
    /// Tabulates `S` on `±[lo, hi]` with `n` Chebyshev nodes per side.
    pub fn new(bath: &BathSpec, lo: f64, hi: f64, n: usize) -> Result<Self> {
        let at_zero = bath.lamb_shift_coefficient(0.0)?;
        let mut tables = Vec::new();
        if hi > lo && lo > 0.0 {
            tables.push(ChebyshevTable::fit(|w| bath.lamb_shift_coefficient(w), lo, hi, n)?);
            tables.push(ChebyshevTable::fit(|w| bath.lamb_shift_coefficient(w), -hi, -lo, n)?);
        }
        Ok(Self { bath: bath.clone(), at_zero, tables })
    }

    pub fn get(&self, omega: f64) -> Result<f64> {
        if omega == 0.0 {
            return Ok(self.at_zero);
        }
        match self.tables.iter().find(|t| t.contains(omega)) {
            Some(t) => Ok(t.eval(omega)),
            None => self.bath.lamb_shift_coefficient(omega),
        }
    }
}

/// One energy level of a Hamiltonian.
#[derive(Clone, Debug)]
pub struct Level {
    pub energy: f64,
    pub projector: QOperator,
}

#[derive(Clone, Debug)]
pub struct BohrDecomposition {
    pub frequencies: Vec<f64>,
    pub components: Vec<QOperator>,
    /// Diagonal blocks `Π_a A Π_a`, one per level (they sum to the ω = 0 component).
    pub level_blocks: Vec<QOperator>,
    pub levels: Vec<Level>,
    pub clustering_tol: f64,
}

impl BohrDecomposition {
    pub fn component(&self, omega: f64) -> Option<&QOperator> {
        self.frequencies
            .iter()
            .position(|w| (w - omega).abs() <= self.clustering_tol)
            .map(|i| &self.components[i])
    }
}

/// Energy levels of `h`, merging eigenvalues within `tol`.
pub fn energy_levels(h: &QOperator, tol: f64) -> Result<Vec<Level>> {
    let (e, v) = h.eigh()?;
    let d = h.dim();
    let mut levels: Vec<(f64, Vec<usize>)> = Vec::new();
    for i in 0..d {
        match levels.last_mut() {
            Some((_, idx)) if (e[i] - e[idx[0]]).abs() <= tol => idx.push(i),
            _ => levels.push((e[i], vec![i])),
        }
    }
    Ok(levels
        .into_iter()
        .map(|(_, idx)| {
            let energy = idx.iter().map(|&i| e[i]).sum::<f64>() / idx.len() as f64;
            let mut p = Array2::<C64>::zeros((d, d));
            for &i in &idx {
                let col = v.column(i);
                for a in 0..d {
                    for b in 0..d {
                        p[[a, b]] += col[a] * col[b].conj();
                    }
                }
            }
            Level { energy, projector: QOperator::from_matrix_unchecked(p) }
        })
        .collect())
}

/// `A_ω = Σ_{E_b − E_a = ω} Π_a A Π_b`, so positive ω lowers the energy.
pub fn bohr_decompose(h: &QOperator, a: &QOperator, tol: Option<f64>) -> Result<BohrDecomposition> {
    h.require_hermitian(1e-12)?;
    if a.dim() != h.dim() {
        return Err(AdiaError::DimensionMismatch { expected: h.dim(), found: a.dim() });
    }
    let scale = linalg::norm2(h.matrix()).max(f64::MIN_POSITIVE);
    let tol = tol.unwrap_or(1e-9 * scale);
    let levels = energy_levels(h, tol)?;
    let mut frequencies: Vec<f64> = Vec::new();
    let mut components: Vec<QOperator> = Vec::new();
    let mut level_blocks = Vec::new();
    for la in &levels {
        for lb in &levels {
            let block = la.projector.dot(a).dot(&lb.projector);
            if std::ptr::eq(la, lb) {
                level_blocks.push(block.clone());
            }
            let omega = lb.energy - la.energy;
            match frequencies.iter().position(|w| (w - omega).abs() <= tol) {
                Some(i) => components[i] = &components[i] + &block,
                None => {
                    frequencies.push(omega);
                    components.push(block);
                }
            }
        }
    }
    let a_scale = linalg::max_abs(a.matrix());
    let keep: Vec<usize> = (0..frequencies.len())
        .filter(|&i| linalg::max_abs(components[i].matrix()) > 1e-15 * a_scale)
        .collect();
    let mut order = keep;
    order.sort_by(|&i, &j| frequencies[i].total_cmp(&frequencies[j]));
    Ok(BohrDecomposition {
        frequencies: order.iter().map(|&i| frequencies[i]).collect(),
        components: order.iter().map(|&i| components[i].clone()).collect(),
        level_blocks,
        levels,
        clustering_tol: tol,
    })
}

/// Parts of a Davies generator, kept separate for diagnostics.
#[derive(Clone, Debug)]
pub struct DaviesParts {
    pub hamiltonian: Superoperator,
    pub lamb_shift: Superoperator,
    pub dissipator: Superoperator,
    pub lamb_shift_hamiltonian: QOperator,
}

impl DaviesParts {
    pub fn total(&self) -> Superoperator {
        &(&self.hamiltonian + &self.lamb_shift) + &self.dissipator
    }

    /// `‖[K + K_LS, D]‖₂ / ‖D‖₂`
    pub fn commutation_defect(&self) -> f64 {
        let k = &self.hamiltonian + &self.lamb_shift;
        let nd = self.dissipator.norm2();
        if nd == 0.0 {
            0.0
        } else {
            k.commutator(&self.dissipator).norm2() / nd
        }
    }
}

/// Davies generator with the Lamb shift supplied by `lamb`.
pub fn davies_parts_with(
    h: &QOperator,
    a: &QOperator,
    bath: &BathSpec,
    lamb: &dyn Fn(f64) -> Result<f64>,
) -> Result<DaviesParts> {
    a.require_hermitian(1e-12)?;
    bath.spectral.validate(bath.beta)?;
    let bohr = bohr_decompose(h, a, None)?;
    let d = h.dim();
    let mut diss = Superoperator::zeros(d);
    let mut h_ls = QOperator::zeros(d);
    for (omega, aw) in bohr.frequencies.iter().zip(&bohr.components) {
        let is_zero = omega.abs() <= bohr.clustering_tol;
        let rate = bath.gamma(if is_zero { 0.0 } else { *omega });
        if rate != 0.0 {
            if is_zero && bath.zero_frequency == ZeroFrequency::PerLevel {
                for blk in &bohr.level_blocks {
                    diss = &diss + &dissipator_single(blk).scale(rate);
                }
            } else {
                diss = &diss + &dissipator_single(aw).scale(rate);
            }
        }
        if bath.lamb_shift {
            let s = lamb(if is_zero { 0.0 } else { *omega })?;
            if s != 0.0 {
                h_ls = &h_ls + &aw.dagger().dot(aw).scale(c(s));
            }
        }
    }
    let hamiltonian = hamiltonian_superop_tol(h, 1e-12)?;
    let lamb_shift = hamiltonian_superop_tol(&QOperator::from_matrix_unchecked(linalg::hermitian_part(h_ls.matrix())), 1e-12)?;
    Ok(DaviesParts { hamiltonian, lamb_shift, dissipator: diss, lamb_shift_hamiltonian: h_ls })
}

pub fn davies_generator(h: &QOperator, a: &QOperator, bath: &BathSpec) -> Result<Superoperator> {
    Ok(davies_parts_with(h, a, bath, &|w| bath.lamb_shift_coefficient(w))?.total())
}

/// `e^{−βH}/Z` computed in the eigenbasis of `H`.
pub fn gibbs_state(h: &QOperator, beta: f64) -> Result<DensityMatrix> {
    h.require_hermitian(1e-12)?;
    let (e, v) = h.eigh()?;
    let e0 = e.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = e.iter().map(|&x| (-beta * (x - e0)).exp()).collect();
    let z: f64 = w.iter().sum();
    let d = h.dim();
    let mut rho = Array2::<C64>::zeros((d, d));
    for k in 0..d {
        let col = v.column(k);
        for a in 0..d {
            for b in 0..d {
                rho[[a, b]] += col[a] * col[b].conj() * (w[k] / z);
            }
        }
    }
    DensityMatrix::new(QOperator::from_matrix_unchecked(linalg::hermitian_part(&rho)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetailedBalance {
    pub stationarity: f64,
    pub normality_defect: f64,
}

/// Stationarity `‖L vec(ρ_G)‖` and the normality defect `‖L L* − L* L‖₂`.
///
/// The adjoint is taken for the dual (observable) generator under
/// `⟨X,Y⟩_G = Tr[ρ_G X†Y]`, which on states is the `ρ_G⁻¹`-weighted product.
pub fn detailed_balance_certificate(l: &Superoperator, rho_g: &DensityMatrix) -> Result<DetailedBalance> {
    let (evals, _) = rho_g.op().eigh()?;
    let min = evals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < 1e-14 {
        return Err(AdiaError::SingularGibbs { min_eigenvalue: min });
    }
    let stationarity = linalg::frobenius(&l.apply_vec(&vectorize(rho_g.op())).insert_axis(ndarray::Axis(1)));
    let rho_inv = QOperator::from_matrix_unchecked(linalg::inv(rho_g.op().matrix())?);
    let rho = rho_g.op();
    // metric for ⟨x, y⟩ = Tr[x† y ρ⁻¹]
    let g = Superoperator::right_mul(&rho_inv);
    let g_inv = Superoperator::right_mul(rho);
    let l_star = g_inv.dot(&l.adjoint()).dot(&g);
    let normality_defect = l.commutator(&l_star).norm2();
    Ok(DetailedBalance { stationarity, normality_defect })
}

/// Eigenvalues `{0, −γ(δ)|A₀₁|²(1+e^{−βδ}), −Γ ± iμ}` of a single-qubit
/// Davies generator.
pub fn example2_spectrum_closed_form(h: &QOperator, a: &QOperator, bath: &BathSpec) -> Result<[C64; 4]> {
    example2_spectrum_with(h, a, bath, &|w| bath.lamb_shift_coefficient(w))
}

pub fn example2_spectrum_with(
    h: &QOperator,
    a: &QOperator,
    bath: &BathSpec,
    lamb: &dyn Fn(f64) -> Result<f64>,
) -> Result<[C64; 4]> {
    if h.dim() != 2 {
        return Err(AdiaError::DimensionMismatch { expected: 2, found: h.dim() });
    }
    h.require_hermitian(1e-12)?;
    let (e, v) = h.eigh()?;
    let delta = e[1] - e[0];
    if delta < 1e-9 * linalg::norm2(h.matrix()).max(1e-300) {
        return Err(AdiaError::DegenerateHamiltonian { gap: delta });
    }
    let ab = dagger(&v).dot(a.matrix()).dot(&v);
    let (a00, a11, a01) = (ab[[0, 0]].norm_sqr(), ab[[1, 1]].norm_sqr(), ab[[0, 1]].norm_sqr());
    let beta = bath.beta;
    let boltz = (-beta * delta).exp();
    let g_delta = bath.gamma(delta);
    let lam2 = -g_delta * a01 * (1.0 + boltz);
    let dephasing = match bath.zero_frequency {
        ZeroFrequency::PerLevel => a00 + a11,
        ZeroFrequency::Grouped => (ab[[0, 0]] - ab[[1, 1]]).norm_sqr(),
    };
    let two_gamma = bath.gamma(0.0) * dephasing + g_delta * a01 * (1.0 + boltz);
    let mu = if bath.lamb_shift {
        delta - lamb(0.0)? * (a00 - a11) + a01 * (lamb(delta)? - lamb(-delta)?)
    } else {
        delta
    };
    let g = 0.5 * two_gamma;
    Ok([C64::new(0.0, 0.0), c(lam2), C64::new(-g, mu), C64::new(-g, -mu)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superop::pauli;

    fn fig2_bath() -> BathSpec {
        BathSpec::new(1.0, SpectralFunction::reference_ohmic())
    }

    #[test]
    fn gamma_at_zero_is_the_limit() {
        let b = fig2_bath();
        assert!((b.gamma(0.0) - 2.0 * std::f64::consts::PI).abs() < 1e-10);
        assert!((b.gamma(1e-7) - b.gamma(0.0)).abs() < 1e-5);
        assert!((b.gamma(-1e-7) - b.gamma(0.0)).abs() < 1e-5);
    }

    #[test]
    fn kms_symmetry_holds() {
        let b = fig2_bath();
        let ws: Vec<f64> = (1..200).map(|k| 0.05 * k as f64).collect();
        assert!(b.kms_violation(&ws) < 1e-14);
        let flat = BathSpec::new(1.0, SpectralFunction::Flat { rate: 1.0 });
        assert!(flat.kms_violation(&[1.0]) > 0.1);
    }

    #[test]
    fn lamb_shift_matches_reference_values() {
        // independent principal-value quadrature (weighted Cauchy rule)
        let b = fig2_bath();
        for (w, oracle) in [
            (0.0, -157.91366975146772),
            (1.0, -165.45594978165605),
            (-1.0, -148.5473220420215),
        ] {
            let s = b.lamb_shift_coefficient(w).unwrap();
            assert!((s - oracle).abs() < 1e-6 * oracle.abs(), "{w}: {s} vs {oracle}");
        }
    }

    #[test]
    fn lamb_shift_vanishes_for_even_density() {
        let flat = BathSpec::new(1.0, SpectralFunction::Flat { rate: 2.0 });
        assert_eq!(flat.lamb_shift_coefficient(0.3).unwrap(), 0.0);
        let tab = BathSpec::new(
            1.0,
            SpectralFunction::Tabulated { omega: vec![-2.0, 0.0, 2.0], gamma: vec![0.0, 1.0, 0.0] },
        );
        assert!(tab.lamb_shift_coefficient(0.0).unwrap().abs() < 1e-12);
        // triangle: S(ω) at ω=3 is ∫ γ(ω')/(3−ω') dω' with no singularity inside
        let direct = integrate(|x| tab.gamma(x) / (3.0 - x), -2.0, 2.0, &[0.0], &QuadConfig::default()).unwrap();
        assert!((tab.lamb_shift_coefficient(3.0).unwrap() - direct.value).abs() < 1e-9);
    }

    #[test]
    fn chebyshev_table_is_accurate() {
        let t = ChebyshevTable::fit(|x| Ok((2.0 * x).sin() + x * x), 0.5, 1.5, 24).unwrap();
        for k in 0..=20 {
            let x = 0.5 + k as f64 / 20.0;
            assert!((t.eval(x) - ((2.0 * x).sin() + x * x)).abs() < 1e-13);
        }
    }

    #[test]
    fn bohr_decomposition_commuting_and_transverse() {
        let bd = bohr_decompose(&pauli::sz(), &pauli::sz(), None).unwrap();
        assert_eq!(bd.frequencies.len(), 1);
        assert!((bd.components[0].matrix() - pauli::sz().matrix()).iter().all(|z| z.norm() < 1e-12));

        let bd = bohr_decompose(&pauli::sz(), &pauli::sx(), None).unwrap();
        let freqs: Vec<f64> = bd.frequencies.clone();
        assert_eq!(freqs.len(), 2);
        assert!((freqs[0] + 2.0).abs() < 1e-12 && (freqs[1] - 2.0).abs() < 1e-12);
        // |0⟩ has energy +1, so the lowering part is σ⁻ = |1⟩⟨0|
        let a2 = bd.component(2.0).unwrap();
        let expected = pauli::sigma_minus();
        assert!((a2.matrix() - expected.matrix()).iter().all(|z| z.norm() < 1e-12));
        let sum = bd.components.iter().fold(QOperator::zeros(2), |acc, x| &acc + x);
        assert!((sum.matrix() - pauli::sx().matrix()).iter().all(|z| z.norm() < 1e-12));
        let am2 = bd.component(-2.0).unwrap();
        assert!((am2.matrix() - a2.dagger().matrix()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn gibbs_state_basics() {
        let rho = gibbs_state(&pauli::sz(), 0.0).unwrap();
        assert!((rho.op().matrix()[[0, 0]] - c(0.5)).norm() < 1e-15);
        let rho = gibbs_state(&pauli::sz(), 1.0).unwrap();
        let z = (-1f64).exp() + 1f64.exp();
        assert!((rho.op().matrix()[[0, 0]].re - (-1f64).exp() / z).abs() < 1e-14);
        assert!((rho.op().matrix()[[1, 1]].re - 1f64.exp() / z).abs() < 1e-14);
    }

    fn check_davies(h: &QOperator, a: &QOperator, bath: &BathSpec) {
        let parts = davies_parts_with(h, a, bath, &|w| bath.lamb_shift_coefficient(w)).unwrap();
        let l = parts.total();
        let rho = gibbs_state(h, bath.beta).unwrap();
        let cert = detailed_balance_certificate(&l, &rho).unwrap();
        assert!(cert.stationarity < 1e-10, "{cert:?}");
        assert!(cert.normality_defect < 1e-9 * l.norm2(), "{cert:?}");
        assert!(parts.commutation_defect() < 1e-9);
        assert!(l.trace_annihilation_residual() < 1e-12);
    }

    #[test]
    fn davies_generator_is_thermal_and_normal() {
        let h = pauli::bloch([-0.25, 0.0, -0.25]);
        for zf in [ZeroFrequency::PerLevel, ZeroFrequency::Grouped] {
            let bath = BathSpec { zero_frequency: zf, ..fig2_bath() };
            check_davies(&h, &(&pauli::sy() * 0.1), &bath);
            check_davies(&h, &(&pauli::sz() * 0.1), &bath);
        }
        // qutrit with a degenerate pair
        let mut hm = Array2::<C64>::zeros((3, 3));
        hm[[0, 0]] = c(-1.0);
        hm[[2, 2]] = c(0.7);
        let h3 = QOperator::new(hm).unwrap();
        let mut am = Array2::<C64>::from_elem((3, 3), c(0.2));
        am[[0, 2]] = C64::new(0.1, 0.3);
        am[[2, 0]] = C64::new(0.1, -0.3);
        check_davies(&h3, &QOperator::new(am).unwrap(), &fig2_bath());
    }

    #[test]
    fn zero_rates_give_pure_commutator() {
        let bath = BathSpec {
            lamb_shift: false,
            ..BathSpec::new(1.0, SpectralFunction::Flat { rate: 0.0 })
        };
        let h = pauli::bloch([0.3, 0.1, -0.2]);
        let l = davies_generator(&h, &pauli::sx(), &bath).unwrap();
        let k = crate::superop::hamiltonian_superop(&h).unwrap();
        assert_eq!(l.matrix(), k.matrix());
    }

    /// Largest distance after greedily pairing each expected value with the
    /// nearest unused computed one.
    pub(crate) fn pairing_error(computed: &[C64], expected: &[C64]) -> f64 {
        let mut used = vec![false; computed.len()];
        let mut worst: f64 = 0.0;
        for y in expected {
            let (k, dist) = computed
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .map(|(k, x)| (k, (x - y).norm() / y.norm().max(1.0)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("as many computed values as expected");
            used[k] = true;
            worst = worst.max(dist);
        }
        worst
    }

    #[test]
    fn closed_form_matches_dense_spectrum() {
        let h = pauli::bloch([-0.3, 0.0, -0.2]);
        for zf in [ZeroFrequency::PerLevel, ZeroFrequency::Grouped] {
            for a in [&pauli::sy() * 0.3, &pauli::sz() * 0.3, &pauli::sx() * 0.2] {
                let bath = BathSpec { zero_frequency: zf, ..fig2_bath() };
                let l = davies_generator(&h, &a, &bath).unwrap();
                let num = linalg::eigvals(l.matrix()).unwrap().to_vec();
                let cf = example2_spectrum_closed_form(&h, &a, &bath).unwrap();
                assert!(pairing_error(&num, &cf) < 1e-10, "{zf:?} {num:?} {cf:?}");
            }
        }
    }

    #[test]
    fn commuting_coupling_has_no_transitions() {
        let h = pauli::sz();
        let eye = &QOperator::identity(2) * 0.5;
        let bath = fig2_bath();
        let cf = example2_spectrum_closed_form(&h, &eye, &bath).unwrap();
        assert_eq!(cf[1].re, 0.0);
        assert!((2.0 * -cf[2].re - 2.0 * bath.gamma(0.0) * 0.25).abs() < 1e-12);
    }

    #[test]
    fn singular_gibbs_rejected() {
        let rho = DensityMatrix::new(QOperator::from_real(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap()).unwrap();
        let err = detailed_balance_certificate(&Superoperator::zeros(2), &rho).unwrap_err();
        assert!(matches!(err, AdiaError::SingularGibbs { .. }));
    }
}
