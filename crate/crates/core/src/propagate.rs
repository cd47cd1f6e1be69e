//! Time-ordered evolution `∂_s E(s, s₀) = T L(s) E(s, s₀)`, ideal adiabatic
//! intertwiners, and the adiabatic error.

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{AdiaError, Result};
use crate::family::LiouvillianFamily;
use crate::linalg::{self, c};
use crate::spectral::{
    analyze, liouvillian_derivative, projector_derivative_at, zero_multiplicity, zero_projector,
    DerivativeScheme, SpectralConfig,
};
use crate::superop::{
    devectorize, is_cptp, vectorize, CptpReport, DensityMatrix, QOperator, StateSpace,
    Superoperator,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Fourth-order Magnus with two Gauss–Legendre nodes per step.
    #[default]
    Magnus4,
    /// `exp(h T L(s + h/2))` per step.
    ExponentialMidpoint,
    /// Dormand–Prince 5(4) with step-size control; for small `T` only.
    AdaptiveRk,
}

impl Method {
    fn order(self) -> i32 {
        match self {
            Method::Magnus4 => 4,
            Method::ExponentialMidpoint => 2,
            Method::AdaptiveRk => 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagatorConfig {
    pub method: Method,
    /// Initial steps satisfy `h·T·‖L‖₂ ≤ step_factor`.
    pub step_factor: f64,
    pub min_steps: usize,
    pub max_steps: usize,
    /// Richardson discrepancy target; `None` means `1e-8·max(1, T·1e-4)`.
    pub tolerance: Option<f64>,
    /// Return the Richardson-extrapolated value instead of the finer one.
    pub extrapolate: bool,
    pub rk_rtol: f64,
    pub rk_atol: f64,
    /// Number of equally spaced checkpoints kept by [`propagate`].
    pub checkpoints: usize,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            method: Method::Magnus4,
            step_factor: 5.0,
            min_steps: 8,
            max_steps: 1 << 24,
            tolerance: None,
            extrapolate: false,
            rk_rtol: 1e-10,
            rk_atol: 1e-12,
            checkpoints: 2,
        }
    }
}

impl PropagatorConfig {
    pub fn tolerance_for(&self, t: f64) -> f64 {
        self.tolerance.unwrap_or(1e-8 * (t * 1e-4).max(1.0))
    }
}

/// A converged propagation result.
#[derive(Clone, Debug)]
pub struct Propagated<V> {
    pub value: V,
    pub steps: usize,
    pub discrepancy: f64,
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // √3/6
const MAGNUS_COMM: f64 = 0.144_337_567_297_406_44; // √3/12

/// One step of the chosen exponential integrator for `Y' = A(s) Y`.
fn step_propagator<G>(gen: &G, s: f64, h: f64, method: Method) -> Result<Array2<C64>>
where
    G: Fn(f64) -> Result<Array2<C64>>,
{
    let omega = match method {
        Method::ExponentialMidpoint => gen(s + 0.5 * h)?.mapv(|z| z * h),
        _ => {
            let a1 = gen(s + (0.5 - GAUSS_OFFSET) * h)?;
            let a2 = gen(s + (0.5 + GAUSS_OFFSET) * h)?;
            let comm = a2.dot(&a1) - a1.dot(&a2);
            (&a1 + &a2).mapv(|z| z * (0.5 * h)) + comm.mapv(|z| z * (MAGNUS_COMM * h * h))
        }
    };
    Ok(linalg::expm(&omega))
}

/// Fixed-step propagation of the columns of `y0` from `s0` to `s1`.
pub(crate) fn fixed_step<G>(gen: &G, y0: &Array2<C64>, s0: f64, s1: f64, n: usize, method: Method) -> Result<Array2<C64>>
where
    G: Fn(f64) -> Result<Array2<C64>>,
{
    let n = n.max(1);
    let h = (s1 - s0) / n as f64;
    let mut y = y0.clone();
    for k in 0..n {
        let s = s0 + k as f64 * h;
        y = step_propagator(gen, s, h, method)?.dot(&y);
    }
    Ok(y)
}

// Dormand–Prince 5(4) tableau
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince integration of `Y' = F(s, Y)`.
pub(crate) fn dormand_prince<F>(
    f: F,
    y0: &Array2<C64>,
    s0: f64,
    s1: f64,
    rtol: f64,
    atol: f64,
    max_steps: usize,
) -> Result<Propagated<Array2<C64>>>
where
    F: Fn(f64, &Array2<C64>) -> Result<Array2<C64>>,
{
    let span = s1 - s0;
    if span == 0.0 {
        return Ok(Propagated { value: y0.clone(), steps: 0, discrepancy: 0.0 });
    }
    let mut y = y0.clone();
    let mut s = s0;
    let mut h = span / 64.0;
    let mut steps = 0;
    let mut worst: f64 = 0.0;
    let mut k1 = f(s, &y)?;
    while (s1 - s) * span.signum() > 1e-15 * span.abs() {
        if steps >= max_steps {
            return Err(AdiaError::NonConvergence { discrepancy: worst, steps });
        }
        if (s + h - s1) * span.signum() > 0.0 {
            h = s1 - s;
        }
        let mut ks = vec![k1.clone()];
        for i in 1..7 {
            let mut yi = y.clone();
            for (j, kj) in ks.iter().enumerate() {
                if DP_A[i][j] != 0.0 {
                    yi.scaled_add(c(h * DP_A[i][j]), kj);
                }
            }
            ks.push(f(s + DP_C[i] * h, &yi)?);
        }
        let mut y5 = y.clone();
        let mut err = Array2::<C64>::zeros(y.raw_dim());
        for i in 0..7 {
            y5.scaled_add(c(h * DP_B5[i]), &ks[i]);
            err.scaled_add(c(h * (DP_B5[i] - DP_B4[i])), &ks[i]);
        }
        let scale = atol + rtol * linalg::max_abs(&y).max(linalg::max_abs(&y5));
        let ratio = linalg::max_abs(&err) / scale;
        steps += 1;
        if ratio <= 1.0 {
            s += h;
            y = y5;
            k1 = ks.pop().expect("seven stages");
            worst = worst.max(ratio * scale);
        }
        let fac = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
        if !h.is_finite() || h.abs() < 1e-14 * span.abs() {
            return Err(AdiaError::NonConvergence { discrepancy: ratio * scale, steps });
        }
    }
    Ok(Propagated { value: y, steps, discrepancy: worst })
}

/// Propagates with step doubling until two successive resolutions agree
/// to `tol` under `measure`.
pub(crate) fn converge<G, M>(
    gen: &G,
    y0: &Array2<C64>,
    s0: f64,
    s1: f64,
    n0: usize,
    tol: f64,
    cfg: &PropagatorConfig,
    measure: M,
) -> Result<Propagated<Array2<C64>>>
where
    G: Fn(f64) -> Result<Array2<C64>> + Sync,
    M: Fn(&Array2<C64>, &Array2<C64>) -> f64,
{
    if cfg.method == Method::AdaptiveRk {
        return dormand_prince(
            |s, y| Ok(gen(s)?.dot(y)),
            y0,
            s0,
            s1,
            cfg.rk_rtol,
            cfg.rk_atol,
            cfg.max_steps,
        );
    }
    let mut n = n0.max(cfg.min_steps).max(1);
    let mut coarse = fixed_step(gen, y0, s0, s1, n, cfg.method)?;
    loop {
        let fine = fixed_step(gen, y0, s0, s1, 2 * n, cfg.method)?;
        let discrepancy = measure(&fine, &coarse);
        if discrepancy <= tol {
            let value = if cfg.extrapolate {
                let w = 2f64.powi(cfg.method.order());
                (&fine * c(w) - &coarse) / c(w - 1.0)
            } else {
                fine
            };
            return Ok(Propagated { value, steps: 2 * n, discrepancy });
        }
        if 4 * n > cfg.max_steps {
            return Err(AdiaError::NonConvergence { discrepancy, steps: 2 * n });
        }
        n *= 2;
        coarse = fine;
    }
}

/// Largest `‖L(s)‖₂` over a few sample points.
pub fn generator_scale(family: &dyn LiouvillianFamily) -> Result<f64> {
    let mut m: f64 = 0.0;
    for k in 0..=8 {
        m = m.max(family.generator(k as f64 / 8.0)?.norm2());
    }
    Ok(m)
}

pub(crate) fn initial_steps(scale: f64, t: f64, span: f64, cfg: &PropagatorConfig) -> usize {
    ((t * scale * span.abs() / cfg.step_factor).ceil() as usize).max(cfg.min_steps)
}

fn scaled_generator(family: &dyn LiouvillianFamily, t: f64) -> impl Fn(f64) -> Result<Array2<C64>> + Sync + '_ {
    move |s: f64| Ok(family.generator(s.clamp(0.0, 1.0))?.into_matrix().mapv(|z| z * t))
}

/// `E(s1, s0)` for total time `t`.
pub fn propagator(
    family: &dyn LiouvillianFamily,
    t: f64,
    s0: f64,
    s1: f64,
    cfg: &PropagatorConfig,
) -> Result<Propagated<Superoperator>> {
    check_time(t)?;
    let like = family.generator(s0)?;
    let n0 = initial_steps(generator_scale(family)?, t, s1 - s0, cfg);
    let gen = scaled_generator(family, t);
    let eye = linalg::eye(like.size());
    let out = converge(&gen, &eye, s0, s1, n0, cfg.tolerance_for(t), cfg, |a, b| {
        linalg::norm2(&(a - b))
    })?;
    Ok(Propagated { value: like.like(out.value), steps: out.steps, discrepancy: out.discrepancy })
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(AdiaError::InvalidParameter(format!("total time T = {t} must be positive")))
    }
}

/// Propagators `E(s_k, 0)` at equally spaced checkpoints.
#[derive(Clone, Debug)]
pub struct EvolutionRecord {
    pub t: f64,
    pub s_grid: Vec<f64>,
    pub propagators: Vec<Superoperator>,
    pub cptp: Vec<CptpReport>,
    pub steps: usize,
    pub discrepancy: f64,
}

impl EvolutionRecord {
    pub fn final_propagator(&self) -> &Superoperator {
        self.propagators.last().expect("record has at least one checkpoint")
    }
}

pub fn propagate(family: &dyn LiouvillianFamily, t: f64, cfg: &PropagatorConfig) -> Result<EvolutionRecord> {
    check_time(t)?;
    let k = cfg.checkpoints.max(2);
    let s_grid: Vec<f64> = (0..k).map(|i| i as f64 / (k - 1) as f64).collect();
    let mut propagators = vec![family.generator(0.0)?.identity_like()];
    let mut steps = 0;
    let mut discrepancy: f64 = 0.0;
    for w in s_grid.windows(2) {
        let seg = propagator(family, t, w[0], w[1], cfg)?;
        steps += seg.steps;
        discrepancy += seg.discrepancy;
        let prev = propagators.last().expect("non-empty");
        propagators.push(seg.value.dot(prev));
    }
    let cptp = match family.space() {
        StateSpace::Liouville => propagators.iter().map(|e| is_cptp(e, 1e-8)).collect(),
        StateSpace::Hilbert => Vec::new(),
    };
    Ok(EvolutionRecord { t, s_grid, propagators, cptp, steps, discrepancy })
}

/// Distance between two states of a family's state space: trace norm of
/// the density-matrix difference (pure states for Hilbert-space vectors).
pub fn state_distance(space: StateSpace, a: &Array1<C64>, b: &Array1<C64>) -> f64 {
    linalg::trace_norm(&(to_density(space, a).into_matrix() - to_density(space, b).matrix()))
}

pub(crate) fn to_density(space: StateSpace, v: &Array1<C64>) -> QOperator {
    match space {
        StateSpace::Liouville => devectorize(v),
        StateSpace::Hilbert => QOperator::outer(v, v),
    }
}

/// Evolves a single state vector over `[0, 1]`.
pub fn evolve_state(
    family: &dyn LiouvillianFamily,
    t: f64,
    v0: &Array1<C64>,
    cfg: &PropagatorConfig,
) -> Result<Propagated<Array1<C64>>> {
    check_time(t)?;
    let n0 = initial_steps(generator_scale(family)?, t, 1.0, cfg);
    evolve_state_from(family, t, v0, n0, cfg)
}

fn evolve_state_from(
    family: &dyn LiouvillianFamily,
    t: f64,
    v0: &Array1<C64>,
    n0: usize,
    cfg: &PropagatorConfig,
) -> Result<Propagated<Array1<C64>>> {
    let space = family.space();
    let gen = scaled_generator(family, t);
    let y0 = v0.clone().insert_axis(Axis(1));
    let out = converge(&gen, &y0, 0.0, 1.0, n0, cfg.tolerance_for(t), cfg, |a, b| {
        state_distance(space, &a.column(0).to_owned(), &b.column(0).to_owned())
    })?;
    Ok(Propagated { value: out.value.column(0).to_owned(), steps: out.steps, discrepancy: out.discrepancy })
}

/// Euler-line products of instantaneous projectors.
#[derive(Clone, Debug)]
pub struct EulerIntertwiner {
    pub n: usize,
    /// `P(s)P(s(N−1)/N)···P(0)`
    pub product: Superoperator,
    /// Same product with `2N` factors.
    pub refined: Superoperator,
    /// `2 W_{2N} − W_N`
    pub extrapolated: Superoperator,
}

fn euler_product(family: &dyn LiouvillianFamily, s: f64, n: usize, zero_tol: f64) -> Result<Superoperator> {
    let mut w = projector_at(family, 0.0, zero_tol)?;
    for k in 1..=n {
        let sk = s * k as f64 / n as f64;
        w = projector_at(family, sk, zero_tol)?.dot(&w);
    }
    Ok(w)
}

fn projector_at(family: &dyn LiouvillianFamily, s: f64, zero_tol: f64) -> Result<Superoperator> {
    zero_projector(&family.generator(s)?, zero_tol).map_err(|e| AdiaError::ProjectorFailure {
        s,
        reason: e.to_string(),
    })
}

pub fn intertwiner_euler(family: &dyn LiouvillianFamily, s: f64, n: usize, zero_tol: f64) -> Result<EulerIntertwiner> {
    if n == 0 {
        return Err(AdiaError::InvalidParameter("Euler product needs N ≥ 1".into()));
    }
    let product = euler_product(family, s, n, zero_tol)?;
    let refined = euler_product(family, s, 2 * n, zero_tol)?;
    let extrapolated = &refined.scale(2.0) - &product;
    Ok(EulerIntertwiner { n, product, refined, extrapolated })
}

/// Right-hand side `[P', P] Y`.
fn transport_rhs<'a>(
    family: &'a dyn LiouvillianFamily,
    cfg: &'a SpectralConfig,
) -> impl Fn(f64, &Array2<C64>) -> Result<Array2<C64>> + 'a {
    move |s: f64, y: &Array2<C64>| {
        let s = s.clamp(0.0, 1.0);
        let a = analyze(family, s, cfg)?;
        if a.gap < cfg.gap_threshold {
            return Err(AdiaError::GapTooSmall { s, gap: a.gap, threshold: cfg.gap_threshold });
        }
        let (dl, _) = liouvillian_derivative(family, s, DerivativeScheme::Auto)?;
        let dp = projector_derivative_at(&a, &dl);
        let k = dp.commutator(&a.projector);
        Ok(k.matrix().dot(y))
    }
}

/// `V(s)` from `V' = [P', P] V`, `V(0) = 1`.
pub fn transport_operator(
    family: &dyn LiouvillianFamily,
    s: f64,
    tol: f64,
    cfg: &SpectralConfig,
) -> Result<Superoperator> {
    let like = family.generator(0.0)?;
    let eye = linalg::eye(like.size());
    let out = dormand_prince(transport_rhs(family, cfg), &eye, 0.0, s, tol, tol, 1 << 20)?;
    Ok(like.like(out.value))
}

/// `W(s) = V(s) P(0)` from the transport equation.
pub fn intertwiner_ode(
    family: &dyn LiouvillianFamily,
    s: f64,
    tol: f64,
    cfg: &SpectralConfig,
) -> Result<Superoperator> {
    let p0 = analyze(family, 0.0, cfg)?.projector;
    let out = dormand_prince(transport_rhs(family, cfg), p0.matrix(), 0.0, s, tol, tol, 1 << 20)?;
    Ok(p0.like(out.value))
}

/// A state `x₀` on which `V(s)` produces a negative eigenvalue.
#[derive(Clone, Debug, Serialize)]
pub struct PositivityWitness {
    #[serde(skip)]
    pub x0: QOperator,
    pub alpha: f64,
    pub lambda: f64,
    /// `λ/d − α`
    pub predicted: f64,
    /// Smallest eigenvalue of `V(s) x₀`.
    pub negative_eigenvalue: f64,
}

pub fn v_nonpositivity_witness(family: &dyn LiouvillianFamily, s: f64, cfg: &SpectralConfig) -> Result<PositivityWitness> {
    let d = family.hilbert_dim();
    let rank = zero_multiplicity(&family.generator(0.0)?, cfg.zero_tol)?;
    if rank != 1 {
        return Err(AdiaError::DegenerateKernel { rank });
    }
    let rho0 = kernel_state(family, 0.0, cfg)?;
    let rho_s = kernel_state(family, s, cfg)?;
    let delta = rho_s.op() - rho0.op();
    let (w, v) = delta.eigh()?;
    let alpha = -w[0];
    if alpha <= 1e-12 {
        return Err(AdiaError::DegenerateCase(format!("steady state does not move between 0 and {s}")));
    }
    let lambda = 0.5 * (alpha * d as f64).min(1.0);
    // any unit vector orthogonal to |α⟩: the eigenvector of the largest eigenvalue
    let perp = v.column(d - 1).to_owned();
    let x0 = &(&QOperator::identity(d) * (lambda / d as f64)) + &(&QOperator::outer(&perp, &perp) * (1.0 - lambda));
    let vop = transport_operator(family, s, 1e-11, cfg)?;
    let image = vop.apply(&x0);
    let (ev, _) = image.eigh()?;
    Ok(PositivityWitness {
        x0,
        alpha,
        lambda,
        predicted: lambda / d as f64 - alpha,
        negative_eigenvalue: ev[0],
    })
}

/// Unit-trace steady state at `s` (unique kernel assumed), preferring the
/// family's closed form.
pub fn kernel_state(family: &dyn LiouvillianFamily, s: f64, cfg: &SpectralConfig) -> Result<DensityMatrix> {
    if let Some(r) = family.reference_state(s) {
        return r;
    }
    let d = family.hilbert_dim();
    let p = zero_projector(&family.generator(s)?, cfg.zero_tol)?;
    let v = p.apply_vec(&vectorize(DensityMatrix::maximally_mixed(d).op()));
    DensityMatrix::normalized(devectorize(&v))
}

/// Initial state and ideal final state for the adiabatic error.
#[derive(Clone, Debug)]
pub struct AdiabaticSetup {
    pub space: StateSpace,
    /// `ρ̃(0)` as a vector in the family's state space.
    pub initial: Array1<C64>,
    /// `ρ̃(1)` as a density matrix.
    pub target: QOperator,
    pub kernel_rank: usize,
    pub generator_scale: f64,
}

/// `ρ̃(0)`: the family's reference state if it has one, otherwise the
/// maximally mixed state projected onto `Ker L(0)` and renormalized.
/// `ρ̃(1) = W(1) ρ̃(0)`, using the closed form for rank-one kernels.
pub fn adiabatic_setup(family: &dyn LiouvillianFamily, cfg: &SpectralConfig) -> Result<AdiabaticSetup> {
    let space = family.space();
    let l0 = family.generator(0.0)?;
    let kernel_rank = zero_multiplicity(&l0, cfg.zero_tol)?;
    let generator_scale = generator_scale(family)?;
    match space {
        StateSpace::Hilbert => {
            let g0 = unit_null_vector(&l0)?;
            let l1 = family.generator(1.0)?;
            let target = if kernel_rank == 1 {
                let g1 = unit_null_vector(&l1)?;
                QOperator::outer(&g1, &g1)
            } else {
                let w = intertwiner_ode(family, 1.0, 1e-11, cfg)?;
                let v = w.apply_vec(&g0);
                QOperator::outer(&v, &v)
            };
            Ok(AdiabaticSetup { space, initial: g0, target, kernel_rank, generator_scale })
        }
        StateSpace::Liouville => {
            let d = family.hilbert_dim();
            let initial = match family.reference_state(0.0) {
                Some(r) => vectorize(r?.op()),
                None => {
                    let p0 = zero_projector(&l0, cfg.zero_tol)?;
                    let v = p0.apply_vec(&vectorize(DensityMatrix::maximally_mixed(d).op()));
                    vectorize(DensityMatrix::normalized(devectorize(&v))?.op())
                }
            };
            let target = if kernel_rank == 1 {
                final_kernel_state(family, cfg)?
            } else {
                let w = intertwiner_ode(family, 1.0, 1e-11, cfg)?;
                devectorize(&w.apply_vec(&initial))
            };
            Ok(AdiabaticSetup { space, initial, target, kernel_rank, generator_scale })
        }
    }
}

/// Steady state at `s = 1`, continued from the interior when the kernel
/// grows at the endpoint.
fn final_kernel_state(family: &dyn LiouvillianFamily, cfg: &SpectralConfig) -> Result<QOperator> {
    if let Some(r) = family.reference_state(1.0) {
        return Ok(r?.op().clone());
    }
    let rank = zero_multiplicity(&family.generator(1.0)?, cfg.zero_tol)?;
    if rank == 1 {
        return Ok(kernel_state(family, 1.0, cfg)?.op().clone());
    }
    let eps = 1e-4;
    let a = kernel_state(family, 1.0 - eps, cfg)?;
    let b = kernel_state(family, 1.0 - 2.0 * eps, cfg)?;
    let c_ = kernel_state(family, 1.0 - 3.0 * eps, cfg)?;
    // quadratic extrapolation to s = 1
    Ok(&(&(a.op() * 3.0) - &(b.op() * 3.0)) + c_.op())
}

fn unit_null_vector(l: &Superoperator) -> Result<Array1<C64>> {
    let ns = linalg::null_space(l.matrix(), 1)?;
    let v = ns.column(0).to_owned();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(v.mapv(|z| z / n))
}

/// One row of an error sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorReport {
    pub t: f64,
    pub error: f64,
    pub steps: usize,
    pub discrepancy: f64,
}

/// `‖ρ(1) − ρ̃(1)‖₁` with `ρ(1) = E(1, 0) ρ̃(0)`.
pub fn adiabatic_error(family: &dyn LiouvillianFamily, t: f64, cfg: &PropagatorConfig) -> Result<ErrorReport> {
    let setup = adiabatic_setup(family, &SpectralConfig::default())?;
    adiabatic_error_with(family, &setup, t, cfg)
}

pub fn adiabatic_error_with(
    family: &dyn LiouvillianFamily,
    setup: &AdiabaticSetup,
    t: f64,
    cfg: &PropagatorConfig,
) -> Result<ErrorReport> {
    check_time(t)?;
    let n0 = initial_steps(setup.generator_scale, t, 1.0, cfg);
    let out = evolve_state_from(family, t, &setup.initial, n0, cfg)?;
    let rho = to_density(setup.space, &out.value);
    let error = linalg::trace_norm(&(rho.into_matrix() - setup.target.matrix()));
    Ok(ErrorReport { t, error, steps: out.steps, discrepancy: out.discrepancy })
}

/// `‖P(s)W − W‖₂` and `‖W P(0) − W‖₂`.
pub fn intertwining_residuals(family: &dyn LiouvillianFamily, s: f64, w: &Superoperator, zero_tol: f64) -> Result<(f64, f64)> {
    let ps = zero_projector(&family.generator(s)?, zero_tol)?;
    let p0 = zero_projector(&family.generator(0.0)?, zero_tol)?;
    Ok(((&ps.dot(w) - w).norm2(), (&w.dot(&p0) - w).norm2()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ConstantFamily, Example1};

    fn tight() -> PropagatorConfig {
        PropagatorConfig { tolerance: Some(1e-11), ..Default::default() }
    }

    #[test]
    fn constant_generator_gives_exponential() {
        let f = ConstantFamily::amplitude_damping([0.3, 0.1, 0.2], 0.5).unwrap();
        let l = f.generator(0.0).unwrap();
        for method in [Method::Magnus4, Method::ExponentialMidpoint, Method::AdaptiveRk] {
            let cfg = PropagatorConfig { method, ..tight() };
            let e = propagator(&f, 7.0, 0.0, 1.0, &cfg).unwrap().value;
            let exact = l.expm(7.0);
            assert!((&e - &exact).max_abs() < 1e-9, "{method:?}");
        }
    }

    #[test]
    fn magnus_is_fourth_order() {
        let f = Example1::default();
        let gen = scaled_generator(&f, 50.0);
        let y0 = linalg::eye(4);
        let reference = fixed_step(&gen, &y0, 0.0, 1.0, 4096, Method::Magnus4).unwrap();
        let e1 = linalg::max_abs(&(fixed_step(&gen, &y0, 0.0, 1.0, 64, Method::Magnus4).unwrap() - &reference));
        let e2 = linalg::max_abs(&(fixed_step(&gen, &y0, 0.0, 1.0, 128, Method::Magnus4).unwrap() - &reference));
        let order = (e1 / e2).log2();
        assert!(order > 3.7 && order < 4.5, "observed order {order}");
        let m1 = linalg::max_abs(&(fixed_step(&gen, &y0, 0.0, 1.0, 64, Method::ExponentialMidpoint).unwrap() - &reference));
        let m2 = linalg::max_abs(&(fixed_step(&gen, &y0, 0.0, 1.0, 128, Method::ExponentialMidpoint).unwrap() - &reference));
        let order = (m1 / m2).log2();
        assert!(order > 1.8 && order < 2.3, "observed midpoint order {order}");
    }

    #[test]
    fn adaptive_rk_cross_check() {
        let f = Example1::default();
        let a = propagator(&f, 20.0, 0.0, 1.0, &tight()).unwrap().value;
        let b = propagator(&f, 20.0, 0.0, 1.0, &PropagatorConfig { method: Method::AdaptiveRk, ..tight() })
            .unwrap()
            .value;
        assert!((&a - &b).max_abs() < 1e-8);
    }

    #[test]
    fn composition_property() {
        let f = Example1::default();
        let cfg = tight();
        let full = propagator(&f, 30.0, 0.0, 1.0, &cfg).unwrap();
        let first = propagator(&f, 30.0, 0.0, 0.5, &cfg).unwrap();
        let second = propagator(&f, 30.0, 0.5, 1.0, &cfg).unwrap();
        let composed = second.value.dot(&first.value);
        assert!((&full.value - &composed).norm2() < 1e-9);
    }

    #[test]
    fn record_checkpoints_are_cptp() {
        let f = Example1::default();
        let rec = propagate(&f, 10.0, &PropagatorConfig { checkpoints: 5, ..Default::default() }).unwrap();
        assert_eq!(rec.s_grid.len(), 5);
        assert!(rec.cptp.iter().all(|r| r.passed));
    }

    #[test]
    fn nonconvergence_is_reported() {
        let f = Example1::default();
        let cfg = PropagatorConfig { tolerance: Some(1e-30), max_steps: 64, ..Default::default() };
        let err = propagator(&f, 10.0, 0.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, AdiaError::NonConvergence { .. }));
        assert!(propagator(&f, -1.0, 0.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn steady_state_is_invariant_under_constant_flow() {
        let f = ConstantFamily::amplitude_damping([0.4, 0.0, 0.1], 0.5).unwrap();
        let setup = adiabatic_setup(&f, &SpectralConfig::default()).unwrap();
        let out = evolve_state(&f, 100.0, &setup.initial, &tight()).unwrap();
        assert!((&out.value - &setup.initial).iter().all(|z| z.norm() < 1e-9));
    }

    #[test]
    fn euler_and_ode_intertwiners_agree_on_example1() {
        let f = Example1::default();
        let cfg = SpectralConfig::default();
        let ode = intertwiner_ode(&f, 1.0, 1e-11, &cfg).unwrap();
        let euler = intertwiner_euler(&f, 1.0, 1024, 1e-10).unwrap();
        assert!((&ode - &euler.extrapolated).max_abs() < 1e-6);
        // rank-one closed form W = |ρ̃(1)⟩⟨1|
        let rho1 = f.reference_state(1.0).unwrap().unwrap();
        let one = vectorize(&QOperator::identity(2));
        let closed = QOperator::outer(&vectorize(rho1.op()), &one).into_matrix();
        assert!(linalg::max_abs(&(ode.matrix() - &closed)) < 1e-9);
    }

    #[test]
    fn constant_family_intertwiner_is_p0() {
        let f = ConstantFamily::amplitude_damping([0.4, 0.0, 0.1], 0.5).unwrap();
        let p0 = zero_projector(&f.generator(0.0).unwrap(), 1e-10).unwrap();
        let e = intertwiner_euler(&f, 0.7, 16, 1e-10).unwrap();
        assert!((&e.product - &p0).max_abs() < 1e-12);
        let w = intertwiner_ode(&f, 0.7, 1e-10, &SpectralConfig::default()).unwrap();
        assert!((&w - &p0).max_abs() < 1e-12);
        let err = v_nonpositivity_witness(&f, 0.7, &SpectralConfig::default()).unwrap_err();
        assert!(matches!(err, AdiaError::DegenerateCase(_)));
    }

    #[test]
    fn witness_on_example1() {
        let f = Example1::default();
        let w = v_nonpositivity_witness(&f, 1.0, &SpectralConfig::default()).unwrap();
        assert!(w.negative_eigenvalue < -1e-6);
        assert!((w.negative_eigenvalue - w.predicted).abs() < 1e-9, "{w:?}");
    }

    #[test]
    fn adiabatic_error_decreases_with_t() {
        let f = Example1::default();
        let e1 = adiabatic_error(&f, 100.0, &PropagatorConfig::default()).unwrap();
        let e2 = adiabatic_error(&f, 1000.0, &PropagatorConfig::default()).unwrap();
        assert!(e2.error < e1.error);
        assert!((e2.error * 1000.0 - 8.0).abs() < 1.0, "{}", e2.error * 1000.0);
    }
}
