//! The quantitative side of the adiabatic theorem: the constant `C`, the
//! first terms of the `1/T` expansion, thermal estimates, level-crossing
//! exponents and power-law fits of error sweeps.

use ndarray::{s, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::davies::gibbs_state;
use crate::error::{AdiaError, Result};
use crate::family::LiouvillianFamily;
use crate::linalg::{self, c};
use crate::norm::{induced_trace_norm_with, NormBudget};
use crate::propagate::{converge, generator_scale, initial_steps, intertwiner_ode, PropagatorConfig};
use crate::spectral::{
    analyze, finite_difference, gap_report, liouvillian_derivative, projector_derivative_at,
    resolvent_derivative_at, x_sequence, DerivativeScheme, SpectralConfig, MAX_X_ORDER,
};
use crate::superop::{DensityMatrix, QOperator, Superoperator};
use crate::tabulate::MatrixInterpolant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundConfig {
    pub grid_points: usize,
    pub golden_iterations: usize,
    /// Step for the central difference `P''`.
    pub p2_step: f64,
    pub norm: NormBudget,
    pub spectral: SpectralConfig,
}

impl Default for BoundConfig {
    fn default() -> Self {
        Self {
            grid_points: 101,
            golden_iterations: 30,
            p2_step: 1e-4,
            norm: NormBudget::default(),
            spectral: SpectralConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundContributions {
    /// `‖S(s)‖ ‖P'(s)‖`
    pub endpoint: f64,
    /// `‖S(0)‖ ‖P'(0)‖`
    pub start: f64,
    /// `sup_σ ‖S'P' + SP''‖`
    pub interior: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub s: f64,
    pub c: f64,
    pub contributions: BoundContributions,
    /// Where the interior supremum was attained.
    pub argmax: f64,
    pub norm_estimator_certified: bool,
    pub s_grid: Vec<f64>,
}

struct NormTracker<'a> {
    budget: &'a NormBudget,
    certified: bool,
}

impl NormTracker<'_> {
    fn norm(&mut self, m: &Superoperator) -> f64 {
        let e = induced_trace_norm_with(m, self.budget);
        self.certified &= e.certified;
        e.value
    }
}

fn require_gap(family: &dyn LiouvillianFamily, s: f64, cfg: &SpectralConfig) -> Result<crate::spectral::PointAnalysis> {
    let a = analyze(family, s, cfg)?;
    if a.gap < cfg.gap_threshold {
        return Err(AdiaError::GapTooSmall { s, gap: a.gap, threshold: cfg.gap_threshold });
    }
    Ok(a)
}

fn pprime(family: &dyn LiouvillianFamily, s: f64, cfg: &SpectralConfig) -> Result<Superoperator> {
    let a = require_gap(family, s, cfg)?;
    let (dl, _) = liouvillian_derivative(family, s, DerivativeScheme::Auto)?;
    Ok(projector_derivative_at(&a, &dl))
}

/// `P''(s)` by differences of the analytic `P'`.
pub fn projector_second_derivative(
    family: &dyn LiouvillianFamily,
    s: f64,
    h: f64,
    cfg: &SpectralConfig,
) -> Result<Superoperator> {
    Ok(finite_difference(|x| pprime(family, x, cfg), s, h)?.0)
}

/// `S'P' + SP''` at `σ`.
fn interior_integrand(family: &dyn LiouvillianFamily, sigma: f64, cfg: &BoundConfig) -> Result<Superoperator> {
    let a = require_gap(family, sigma, &cfg.spectral)?;
    let (dl, _) = liouvillian_derivative(family, sigma, DerivativeScheme::Auto)?;
    let dp = projector_derivative_at(&a, &dl);
    let ds = resolvent_derivative_at(&a, &dl);
    let d2p = projector_second_derivative(family, sigma, cfg.p2_step, &cfg.spectral)?;
    Ok(&ds.dot(&dp) + &a.resolvent.dot(&d2p))
}

/// The constant `C` with `‖[E(s) − V(s)]P(0)‖ ≤ C/T`.
pub fn constant_c(family: &dyn LiouvillianFamily, s: f64, cfg: &BoundConfig) -> Result<BoundReport> {
    crate::family::check_unit_interval(s)?;
    let mut tracker = NormTracker { budget: &cfg.norm, certified: true };
    let endpoint_term = |x: f64, tracker: &mut NormTracker| -> Result<f64> {
        let a = require_gap(family, x, &cfg.spectral)?;
        let (dl, _) = liouvillian_derivative(family, x, DerivativeScheme::Auto)?;
        let dp = projector_derivative_at(&a, &dl);
        Ok(tracker.norm(&a.resolvent) * tracker.norm(&dp))
    };
    let endpoint = endpoint_term(s, &mut tracker)?;
    let start = endpoint_term(0.0, &mut tracker)?;

    let n = cfg.grid_points.max(2);
    let s_grid: Vec<f64> = (0..n).map(|k| s * k as f64 / (n - 1) as f64).collect();
    let mut values = Vec::with_capacity(n);
    for &x in &s_grid {
        values.push(tracker.norm(&interior_integrand(family, x, cfg)?));
    }
    let (kmax, &vmax) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let mut best = (s_grid[kmax], vmax);
    if s > 0.0 {
        let lo = s_grid[kmax.saturating_sub(1)];
        let hi = s_grid[(kmax + 1).min(n - 1)];
        let mut f = |x: f64| -> Result<f64> { Ok(tracker.norm(&interior_integrand(family, x, cfg)?)) };
        let r = golden_max(&mut f, lo, hi, cfg.golden_iterations)?;
        if r.1 > best.1 {
            best = r;
        }
    }
    let contributions = BoundContributions { endpoint, start, interior: best.1 };
    Ok(BoundReport {
        s,
        c: endpoint + start + best.1,
        contributions,
        argmax: best.0,
        norm_estimator_certified: tracker.certified,
        s_grid,
    })
}

/// Golden-section search for a maximum on `[a, b]`.
fn golden_max<F>(f: &mut F, mut a: f64, mut b: f64, iterations: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iterations {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 > f2 { (x1, f1) } else { (x2, f2) })
}

/// Expansion terms together with the exact and ideal evolutions they
/// approximate.
#[derive(Clone, Debug)]
pub struct ExpansionTerms {
    pub s: f64,
    pub t: f64,
    /// `[Ω₁, …, Ω_m]`
    pub omega: Vec<Superoperator>,
    /// `E(s, 0) P(0)`
    pub propagated: Superoperator,
    /// `W(s) = V(s) P(0)`
    pub intertwiner: Superoperator,
    pub steps: usize,
    pub discrepancy: f64,
}

impl ExpansionTerms {
    /// `[E(s) − V(s)]P(0) − Σ_{n ≤ k} Ω_n / T^n`
    pub fn remainder(&self, k: usize) -> Superoperator {
        let mut r = &self.propagated - &self.intertwiner;
        for (n, om) in self.omega.iter().take(k).enumerate() {
            r = &r - &om.scale(self.t.powi(-(n as i32 + 1)));
        }
        r
    }
}

/// Tolerances for [`expansion_terms`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExpansionConfig {
    pub propagator: PropagatorConfig,
    pub spectral: SpectralConfig,
    /// Interpolation tolerance for the integrands, relative to their size.
    pub table_tol: f64,
    /// Step for `P''` and for differentiating the intertwiner.
    pub p2_step: f64,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        Self {
            propagator: PropagatorConfig { tolerance: Some(1e-12), extrapolate: true, ..Default::default() },
            spectral: SpectralConfig::default(),
            table_tol: 1e-11,
            p2_step: 1e-4,
        }
    }
}

struct Derivs {
    w: Superoperator,
    w1: Superoperator,
    w2: Superoperator,
}

/// `W, W' = P'W, W'' = (P'' + P'²)W`.
fn intertwiner_derivs(
    family: &dyn LiouvillianFamily,
    sigma: f64,
    rank_one_p0: Option<&Superoperator>,
    cfg: &ExpansionConfig,
) -> Result<Derivs> {
    let a = require_gap(family, sigma, &cfg.spectral)?;
    let w = match rank_one_p0 {
        Some(p0) => a.projector.dot(p0),
        None => intertwiner_ode(family, sigma, 1e-12, &cfg.spectral)?,
    };
    let (dl, _) = liouvillian_derivative(family, sigma, DerivativeScheme::Auto)?;
    let dp = projector_derivative_at(&a, &dl);
    let d2p = projector_second_derivative(family, sigma, cfg.p2_step, &cfg.spectral)?;
    let w1 = dp.dot(&w);
    let w2 = (&d2p + &dp.dot(&dp)).dot(&w);
    Ok(Derivs { w, w1, w2 })
}

/// `Ω_n = E(s,σ)X_n(σ)W'(σ)|₀ˢ − ∫₀ˢ E(s,σ)X_n(σ)W''(σ)dσ` for `n ≤ m`.
///
/// The integrals are obtained by propagating with the block generator
/// `[[T L(σ), F₁(σ), …], [0, 0, …]]`, whose upper-right blocks of the
/// propagator are `∫ E(s,σ) F_n(σ) dσ`.
pub fn expansion_terms(
    family: &dyn LiouvillianFamily,
    s: f64,
    t: f64,
    m: usize,
    cfg: &ExpansionConfig,
) -> Result<ExpansionTerms> {
    crate::family::check_unit_interval(s)?;
    if m == 0 || m > MAX_X_ORDER {
        return Err(AdiaError::OrderTooHigh { requested: m, max: MAX_X_ORDER });
    }
    if !(t > 0.0) {
        return Err(AdiaError::InvalidParameter(format!("total time T = {t} must be positive")));
    }
    let a0 = require_gap(family, 0.0, &cfg.spectral)?;
    let rank = a0.zero_multiplicity;
    if rank > 1 && m > 1 {
        return Err(AdiaError::DegenerateKernel { rank });
    }
    let p0 = a0.projector.clone();
    let rank_one = (rank == 1).then_some(&p0);
    let big = p0.size();

    // F_n(σ) = X_n(σ) W''(σ), stacked side by side
    let integrand = |sigma: f64| -> Result<Array2<C64>> {
        let d = intertwiner_derivs(family, sigma, rank_one, cfg)?;
        let xs = x_sequence(family, sigma, m, &cfg.spectral)?;
        let mut out = Array2::<C64>::zeros((big, big * m));
        for (n, x) in xs.iter().enumerate() {
            out.slice_mut(s![.., n * big..(n + 1) * big]).assign(x.dot(&d.w2).matrix());
        }
        Ok(out)
    };
    let scale = linalg::max_abs(&integrand(0.5 * s)?).max(linalg::max_abs(&integrand(s)?)).max(1e-300);
    let table = if s > 0.0 {
        Some(MatrixInterpolant::build(integrand, 0.0, s, 16, cfg.table_tol * scale)?)
    } else {
        None
    };

    let boundary = |sigma: f64| -> Result<Vec<Superoperator>> {
        let d = intertwiner_derivs(family, sigma, rank_one, cfg)?;
        Ok(x_sequence(family, sigma, m, &cfg.spectral)?.iter().map(|x| x.dot(&d.w1)).collect())
    };
    let at_s = boundary(s)?;
    let at_0 = boundary(0.0)?;
    let w_s = intertwiner_derivs(family, s, rank_one, cfg)?.w;

    // columns: [P(0) | X_n(0)W'(0) ... | 0 ...] over [I_{mN}] in the lower block
    let aug = (m + 1) * big;
    let cols = big * (2 * m + 1);
    let mut y0 = Array2::<C64>::zeros((aug, cols));
    y0.slice_mut(s![..big, ..big]).assign(p0.matrix());
    for n in 0..m {
        y0.slice_mut(s![..big, (n + 1) * big..(n + 2) * big]).assign(at_0[n].matrix());
        let off = (m + 1) * big + n * big;
        for k in 0..big {
            y0[[big + n * big + k, off + k]] = c(1.0);
        }
    }
    let gen = |sigma: f64| -> Result<Array2<C64>> {
        let sigma = sigma.clamp(0.0, s);
        let mut g = Array2::<C64>::zeros((aug, aug));
        g.slice_mut(s![..big, ..big]).assign(&family.generator(sigma)?.into_matrix().mapv(|z| z * t));
        if let Some(tab) = &table {
            g.slice_mut(s![..big, big..]).assign(&tab.eval(sigma));
        }
        Ok(g)
    };
    let n0 = initial_steps(generator_scale(family)?, t, s, &cfg.propagator);
    let tol = cfg.propagator.tolerance_for(t);
    let out = if s > 0.0 {
        converge(&gen, &y0, 0.0, s, n0, tol, &cfg.propagator, |a, b| linalg::max_abs(&(a - b)))?
    } else {
        crate::propagate::Propagated { value: y0.clone(), steps: 0, discrepancy: 0.0 }
    };
    let y = out.value;
    let like = |mat: Array2<C64>| p0.like(mat);
    let propagated = like(y.slice(s![..big, ..big]).to_owned());
    let mut omega = Vec::with_capacity(m);
    for n in 0..m {
        let e_x_w1 = like(y.slice(s![..big, (n + 1) * big..(n + 2) * big]).to_owned());
        let off = (m + 1) * big + n * big;
        let integral = like(y.slice(s![..big, off..off + big]).to_owned());
        omega.push(&(&at_s[n] - &e_x_w1) - &integral);
    }
    Ok(ExpansionTerms {
        s,
        t,
        omega,
        propagated,
        intertwiner: w_s,
        steps: out.steps,
        discrepancy: out.discrepancy,
    })
}

/// `2β √Tr[ρ_G H'²]`, an upper bound on `‖ρ_G'‖₁`.
pub fn kms_pprime_bound(h_prime: &QOperator, rho_g: &DensityMatrix, beta: f64) -> Result<f64> {
    h_prime.require_hermitian(1e-10)?;
    let h2 = h_prime.dot(h_prime);
    let ev = rho_g.op().dot(&h2).trace().re.max(0.0);
    Ok(2.0 * beta * ev.sqrt())
}

/// `‖ρ_G'(s)‖₁` by central differences of the Gibbs state.
pub fn gibbs_derivative_norm(family: &dyn LiouvillianFamily, s: f64, h: f64) -> Result<f64> {
    let beta = thermal_beta(family)?;
    let gibbs = |x: f64| -> Result<QOperator> {
        let ham = family.hamiltonian(x).ok_or_else(no_hamiltonian)??;
        Ok(gibbs_state(&ham, beta)?.op().clone())
    };
    let (a, b) = if s - h < 0.0 {
        (s, s + h)
    } else if s + h > 1.0 {
        (s - h, s)
    } else {
        (s - h, s + h)
    };
    Ok((&gibbs(b)? - &gibbs(a)?).trace_norm() / (b - a))
}

fn thermal_beta(family: &dyn LiouvillianFamily) -> Result<f64> {
    family
        .beta()
        .ok_or_else(|| AdiaError::InvalidParameter(format!("family {} is not thermal", family.name())))
}

fn no_hamiltonian() -> AdiaError {
    AdiaError::InvalidParameter("family has no system Hamiltonian".into())
}

/// Thermal estimate of a sufficient total time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeEstimate {
    pub t_sufficient: f64,
    pub epsilon: f64,
    pub beta: f64,
    /// Measured `sup ‖S‖·Δ`.
    pub c: f64,
    pub delta_min: f64,
    pub lprime_max: f64,
    /// `max_s Tr[ρ_G H'²]`
    pub h2_max: f64,
    pub norm_estimator_certified: bool,
}

/// `T ≳ c² β ‖L'‖_max √⟨H'²⟩_{G,max} / (Δ_min² ε)`.
pub fn adiabatic_time_estimate(
    family: &dyn LiouvillianFamily,
    s_grid: &[f64],
    epsilon: f64,
    cfg: &BoundConfig,
) -> Result<TimeEstimate> {
    if !(epsilon > 0.0) {
        return Err(AdiaError::InvalidParameter("epsilon must be positive".into()));
    }
    if s_grid.is_empty() {
        return Err(AdiaError::InvalidParameter("empty s grid".into()));
    }
    let beta = thermal_beta(family)?;
    let mut tracker = NormTracker { budget: &cfg.norm, certified: true };
    let (mut c_max, mut delta_min, mut lprime_max, mut h2_max) = (0.0f64, f64::INFINITY, 0.0f64, 0.0f64);
    for &s in s_grid {
        let a = require_gap(family, s, &cfg.spectral)?;
        c_max = c_max.max(tracker.norm(&a.resolvent) * a.gap);
        delta_min = delta_min.min(a.gap);
        let (dl, _) = liouvillian_derivative(family, s, DerivativeScheme::Auto)?;
        lprime_max = lprime_max.max(tracker.norm(&dl));
        let ham = family.hamiltonian(s).ok_or_else(no_hamiltonian)??;
        let hp = family.hamiltonian_derivative(s).ok_or_else(no_hamiltonian)??;
        let rho = gibbs_state(&ham, beta)?;
        h2_max = h2_max.max(rho.op().dot(&hp.dot(&hp)).trace().re);
    }
    let t_sufficient = c_max * c_max * beta * lprime_max * h2_max.sqrt() / (delta_min * delta_min * epsilon);
    Ok(TimeEstimate {
        t_sufficient,
        epsilon,
        beta,
        c: c_max,
        delta_min,
        lprime_max,
        h2_max,
        norm_estimator_certified: tracker.certified,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub s_star: f64,
    pub alpha: f64,
    pub v: f64,
    pub eta: f64,
    /// Smallest gap seen on the grid near `s*`.
    pub min_gap: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CrossingReport {
    pub crossings: Vec<Crossing>,
    pub threshold: f64,
    pub median_gap: f64,
}

/// Gap above the baseline kernel: zero where the kernel is larger than
/// `baseline`.
fn scan_gap(family: &dyn LiouvillianFamily, s: f64, baseline: usize, cfg: &SpectralConfig) -> Result<f64> {
    let r = gap_report(&family.generator(s)?, s, cfg)?;
    Ok(if r.zero_multiplicity > baseline { 0.0 } else { r.gap })
}

/// Finds closings of the gap `Δ(s) ≈ v|s − s*|^α` on `grid`.
pub fn crossing_scan(family: &dyn LiouvillianFamily, grid: &[f64], cfg: &SpectralConfig) -> Result<CrossingReport> {
    if grid.len() < 3 {
        return Err(AdiaError::InsufficientData { rows: grid.len(), required: 3 });
    }
    let reports = grid
        .iter()
        .map(|&s| gap_report(&family.generator(s)?, s, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut mults: Vec<usize> = reports.iter().map(|r| r.zero_multiplicity).collect();
    mults.sort_unstable();
    let baseline = mults[mults.len() / 2];
    let gaps: Vec<f64> = reports
        .iter()
        .map(|r| if r.zero_multiplicity > baseline { 0.0 } else { r.gap })
        .collect();
    let mut sorted = gaps.clone();
    sorted.sort_by(f64::total_cmp);
    let median_gap = sorted[sorted.len() / 2];
    let threshold = 1e-3 * median_gap;

    let mut crossings = Vec::new();
    let mut k = 0;
    while k < gaps.len() {
        if gaps[k] >= threshold {
            k += 1;
            continue;
        }
        let start = k;
        while k < gaps.len() && gaps[k] < threshold {
            k += 1;
        }
        let (imin, &gmin) = gaps[start..k]
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty run");
        let s_star = grid[start + imin];
        let lo = grid[start.saturating_sub(1)];
        let hi = grid[k.min(grid.len() - 1)];
        let reach = (s_star - lo).max(hi - s_star).max(1e-6);
        let mut pts = Vec::new();
        for side in [-1.0, 1.0] {
            for j in 0..16 {
                let u = reach * 10f64.powf(-2.0 * j as f64 / 15.0);
                let x = s_star + side * u;
                if !(0.0..=1.0).contains(&x) {
                    continue;
                }
                let g = scan_gap(family, x, baseline, cfg)?;
                if g > 0.0 && g < 0.5 * median_gap {
                    pts.push((u.ln(), g.ln()));
                }
            }
        }
        if pts.len() >= 3 {
            let (slope, intercept, _) = least_squares(&pts);
            if slope > 0.0 {
                crossings.push(Crossing {
                    s_star,
                    alpha: slope,
                    v: intercept.exp(),
                    eta: 1.0 / (1.0 + slope),
                    min_gap: gmin,
                });
            }
        }
    }
    Ok(CrossingReport { crossings, threshold, median_gap })
}

/// Slope, intercept and rms residual of an ordinary least-squares line.
pub(crate) fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rms = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    (slope, intercept, rms)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FitWindow {
    /// Top 40% of the `T` range in log scale.
    #[default]
    Upper,
    Range { t_min: f64, t_max: f64 },
    All,
}

/// `error ≈ prefactor / T^exponent`
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub prefactor: f64,
    pub exponent: f64,
    pub window: (f64, f64),
    pub residual: f64,
    pub rows: usize,
}

impl PowerLawFit {
    pub fn predict(&self, t: f64) -> f64 {
        self.prefactor * t.powf(-self.exponent)
    }
}

/// Least-squares fit of `log error` against `log T` over the window.
pub fn fit_power_law(rows: &[(f64, f64)], window: FitWindow) -> Result<PowerLawFit> {
    let (lo, hi) = match window {
        FitWindow::All => (f64::NEG_INFINITY, f64::INFINITY),
        FitWindow::Range { t_min, t_max } => (t_min, t_max),
        FitWindow::Upper => {
            let lmin = rows.iter().map(|r| r.0.ln()).fold(f64::INFINITY, f64::min);
            let lmax = rows.iter().map(|r| r.0.ln()).fold(f64::NEG_INFINITY, f64::max);
            ((lmin + 0.6 * (lmax - lmin)).exp() * (1.0 - 1e-12), f64::INFINITY)
        }
    };
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.0 >= lo && r.0 <= hi && r.0 > 0.0 && r.1 > 0.0)
        .map(|r| (r.0.ln(), r.1.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(AdiaError::InsufficientData { rows: pts.len(), required: 4 });
    }
    let (slope, intercept, residual) = least_squares(&pts);
    let used_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).exp();
    let used_max = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).exp();
    Ok(PowerLawFit {
        prefactor: intercept.exp(),
        exponent: -slope,
        window: (used_min, used_max),
        residual,
        rows: pts.len(),
    })
}
