//! Built-in Liouvillian families.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::davies::{
    davies_parts_with, example2_spectrum_closed_form, gibbs_state, BathSpec, DaviesParts,
    LambShiftCache, SpectralFunction,
};
use crate::error::{AdiaError, Result};
use crate::family::{check_unit_interval, HilbertData, LiouvillianFamily, Schedule};
use crate::linalg::{c, I};
use crate::superop::{
    dissipator_single, hamiltonian_superop, lindbladian, pauli, DensityMatrix, QOperator,
    StateSpace, Superoperator,
};
use crate::C64;

/// Amplitude damping with a driven Hamiltonian `H(s) = m(s)·σ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Example1 {
    pub mx: Schedule,
    pub my: Schedule,
    pub mz: Schedule,
    pub gamma: f64,
}

impl Default for Example1 {
    fn default() -> Self {
        Self {
            mx: Schedule::linear(1.0, -1.0),
            my: Schedule::constant(0.0),
            mz: Schedule::linear(0.0, 1.0 / 150.0),
            gamma: 0.5,
        }
    }
}

impl Example1 {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) {
            return Err(AdiaError::InvalidParameter(format!("gamma = {} must be ≥ 0", self.gamma)));
        }
        Ok(())
    }

    pub fn bloch(&self, s: f64) -> [f64; 3] {
        [self.mx.eval(s), self.my.eval(s), self.mz.eval(s)]
    }

    pub fn bloch_derivative(&self, s: f64) -> [f64; 3] {
        [self.mx.derivative(s), self.my.derivative(s), self.mz.derivative(s)]
    }

    fn jump(&self) -> QOperator {
        &pauli::sigma_minus() * (2.0 * self.gamma).sqrt()
    }
}

impl LiouvillianFamily for Example1 {
    fn name(&self) -> &str {
        "example1"
    }

    fn hilbert_dim(&self) -> usize {
        2
    }

    fn params(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or_default()
    }

    fn hilbert_data(&self, s: f64) -> Option<Result<HilbertData>> {
        Some(Ok(HilbertData { hamiltonian: pauli::bloch(self.bloch(s)), lindblad_ops: vec![self.jump()] }))
    }

    fn hilbert_derivative(&self, s: f64) -> Option<Result<HilbertData>> {
        Some(Ok(HilbertData {
            hamiltonian: pauli::bloch(self.bloch_derivative(s)),
            lindblad_ops: vec![QOperator::zeros(2)],
        }))
    }

    fn reference_state(&self, s: f64) -> Option<Result<DensityMatrix>> {
        Some(example1_iss_closed_form(self.bloch(s), self.gamma))
    }
}

/// Steady state of `−i[m·σ, ·] + D[√(2γ) σ⁻]` in the σᶻ basis.
pub fn example1_iss_closed_form(m: [f64; 3], gamma: f64) -> Result<DensityMatrix> {
    let [mx, my, mz] = m;
    let m2 = mx * mx + my * my + mz * mz;
    let cn = 2.0 * (m2 + mz * mz) + gamma * gamma;
    if !(cn > 0.0) {
        return Err(AdiaError::DegenerateCase("m = 0 and γ = 0: every state is stationary".into()));
    }
    let m_minus = C64::new(mx, -my);
    let m_plus = C64::new(mx, my);
    let rho = ndarray::array![
        [c(m2 - mz * mz), -m_minus * C64::new(2.0 * mz, gamma)],
        [-m_plus * C64::new(2.0 * mz, -gamma), c(m2 + 3.0 * mz * mz + gamma * gamma)]
    ]
    .mapv(|z| z / cn);
    DensityMatrix::new(QOperator::new(rho)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingAxis {
    X,
    Y,
    Z,
}

impl CouplingAxis {
    pub fn pauli(self) -> QOperator {
        match self {
            CouplingAxis::X => pauli::sx(),
            CouplingAxis::Y => pauli::sy(),
            CouplingAxis::Z => pauli::sz(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Example2Params {
    pub omega_x: f64,
    pub omega_z: f64,
    pub g: f64,
    pub coupling: CouplingAxis,
    pub bath: BathSpec,
}

impl Default for Example2Params {
    fn default() -> Self {
        Self {
            omega_x: -0.5,
            omega_z: -0.5,
            g: 1e-2,
            coupling: CouplingAxis::Y,
            bath: BathSpec::new(1.0, SpectralFunction::reference_ohmic()),
        }
    }
}

impl Example2Params {
    pub fn with_coupling(coupling: CouplingAxis) -> Self {
        Self { coupling, ..Default::default() }
    }
}

/// Qubit `H(s) = ω_x(1−s)σˣ + ω_z s σᶻ` under a Davies generator with
/// coupling `A = g σ^{axis}`.
#[derive(Clone, Debug)]
pub struct Example2 {
    params: Example2Params,
    lamb: Option<LambShiftCache>,
}

const LAMB_TABLE_NODES: usize = 40;

impl Example2 {
    pub fn new(params: Example2Params) -> Result<Self> {
        params.bath.spectral.validate(params.bath.beta)?;
        let (a, b) = (params.omega_x.abs(), params.omega_z.abs());
        if a + b == 0.0 {
            return Err(AdiaError::DegenerateHamiltonian { gap: 0.0 });
        }
        let lamb = if params.bath.lamb_shift {
            // δ(s) = 2‖m(s)‖ ranges over [2ab/√(a²+b²), 2 max(a, b)]
            let lo = 2.0 * a * b / (a * a + b * b).sqrt();
            let hi = 2.0 * a.max(b);
            Some(LambShiftCache::new(&params.bath, 0.98 * lo, 1.02 * hi, LAMB_TABLE_NODES)?)
        } else {
            None
        };
        Ok(Self { params, lamb })
    }

    pub fn params_ref(&self) -> &Example2Params {
        &self.params
    }

    pub fn bloch(&self, s: f64) -> [f64; 3] {
        [self.params.omega_x * (1.0 - s), 0.0, self.params.omega_z * s]
    }

    pub fn system_hamiltonian(&self, s: f64) -> QOperator {
        pauli::bloch(self.bloch(s))
    }

    pub fn coupling_operator(&self) -> QOperator {
        &self.params.coupling.pauli() * self.params.g
    }

    /// Hamiltonian gap `δ = 2‖m‖`.
    pub fn delta(&self, s: f64) -> f64 {
        let [x, y, z] = self.bloch(s);
        2.0 * (x * x + y * y + z * z).sqrt()
    }

    fn lamb_shift(&self, w: f64) -> Result<f64> {
        match &self.lamb {
            Some(cache) => cache.get(w),
            None => Ok(0.0),
        }
    }

    pub fn parts(&self, s: f64) -> Result<DaviesParts> {
        check_unit_interval(s)?;
        davies_parts_with(
            &self.system_hamiltonian(s),
            &self.coupling_operator(),
            &self.params.bath,
            &|w| self.lamb_shift(w),
        )
    }

    /// Closed-form eigenvalues, with Lamb-shift coefficients from direct
    /// quadrature rather than the cached interpolant.
    pub fn closed_form_spectrum(&self, s: f64) -> Result<[C64; 4]> {
        example2_spectrum_closed_form(&self.system_hamiltonian(s), &self.coupling_operator(), &self.params.bath)
    }
}

impl LiouvillianFamily for Example2 {
    fn name(&self) -> &str {
        "example2"
    }

    fn hilbert_dim(&self) -> usize {
        2
    }

    fn params(&self) -> serde_json::Value {
        serde_json::to_value(&self.params).unwrap_or_default()
    }

    fn hamiltonian(&self, s: f64) -> Option<Result<QOperator>> {
        Some(Ok(self.system_hamiltonian(s)))
    }

    fn hamiltonian_derivative(&self, _s: f64) -> Option<Result<QOperator>> {
        Some(Ok(pauli::bloch([-self.params.omega_x, 0.0, self.params.omega_z])))
    }

    fn beta(&self) -> Option<f64> {
        Some(self.params.bath.beta)
    }

    fn generator(&self, s: f64) -> Result<Superoperator> {
        Ok(self.parts(s)?.total())
    }

    fn reference_state(&self, s: f64) -> Option<Result<DensityMatrix>> {
        Some(gibbs_state(&self.system_hamiltonian(s), self.params.bath.beta))
    }
}

/// `L(s) = e^{sK} L₀ e^{−sK}` for an anti-Hermitian superoperator `K`.
#[derive(Clone, Debug)]
pub struct UnitaryFamily {
    l0: Superoperator,
    k: Superoperator,
}

impl UnitaryFamily {
    pub fn new(l0: Superoperator, k: Superoperator) -> Result<Self> {
        if l0.size() != k.size() {
            return Err(AdiaError::DimensionMismatch { expected: l0.size(), found: k.size() });
        }
        let defect = (&k + &k.adjoint()).max_abs();
        if defect > 1e-12 * k.max_abs().max(1.0) {
            return Err(AdiaError::NonAntiHermitianK { defect });
        }
        Ok(Self { l0, k })
    }

    /// Rotation of a qubit Lindbladian by the Hamiltonian `k·σ`.
    pub fn qubit_rotation(l0: Superoperator, k: [f64; 3]) -> Result<Self> {
        let kk = hamiltonian_superop(&pauli::bloch(k))?;
        Self::new(l0, kk)
    }

    pub fn rotation(&self, s: f64) -> Superoperator {
        self.k.expm(s)
    }

    pub fn k(&self) -> &Superoperator {
        &self.k
    }

    pub fn base(&self) -> &Superoperator {
        &self.l0
    }
}

impl LiouvillianFamily for UnitaryFamily {
    fn name(&self) -> &str {
        "unitary"
    }

    fn hilbert_dim(&self) -> usize {
        self.l0.dim()
    }

    fn params(&self) -> serde_json::Value {
        json!({ "size": self.l0.size() })
    }

    fn generator(&self, s: f64) -> Result<Superoperator> {
        check_unit_interval(s)?;
        Ok(self.rotation(s).dot(&self.l0).dot(&self.rotation(-s)))
    }

    fn generator_derivative(&self, s: f64) -> Option<Result<Superoperator>> {
        Some(self.generator(s).map(|l| self.k.commutator(&l)))
    }
}

/// Parameters of the engineered level-crossing family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticCrossingSpec {
    pub alpha: f64,
    pub s_star: f64,
    pub v: f64,
    /// Rate of the fast two-state block.
    pub kappa: f64,
    /// When false, the slow mode is decoupled from the steady-state path.
    pub coupled: bool,
}

impl Default for SyntheticCrossingSpec {
    fn default() -> Self {
        Self { alpha: 2.0, s_star: 1.0, v: 1.0, kappa: 1.0, coupled: true }
    }
}

/// Classical three-level chain with a fast pair `{0, 1}` and a slow
/// exchange with level 2 at rate `λ(s) = v|s − s*|^α`.
///
/// Every level in the pair leaves for level 2 at rate `λw`, and level 2
/// returns at rate `λ(1−w)` split `q : 1−q`, so the stationary
/// distribution is `(q(1−w), (1−q)(1−w), w)` and the slow eigenvalue is
/// exactly `−λ`. In the coupled variant `w` depends on `s`, in the
/// decoupled one only `q` does.
#[derive(Clone, Debug)]
pub struct SyntheticCrossing {
    spec: SyntheticCrossingSpec,
    jumps: Vec<Superoperator>,
}

const SYNTH_TRANSITIONS: [(usize, usize); 6] = [(0, 1), (1, 0), (0, 2), (1, 2), (2, 0), (2, 1)];

impl SyntheticCrossing {
    pub fn new(spec: SyntheticCrossingSpec) -> Result<Self> {
        if !(spec.alpha > 0.0 && spec.v > 0.0 && spec.kappa > 0.0) {
            return Err(AdiaError::InvalidParameter("alpha, v and kappa must be positive".into()));
        }
        check_unit_interval(spec.s_star)?;
        let jumps = SYNTH_TRANSITIONS
            .iter()
            .map(|&(i, j)| {
                let mut e = QOperator::zeros(3).into_matrix();
                e[[j, i]] = c(1.0);
                dissipator_single(&QOperator::from_matrix_unchecked(e))
            })
            .collect();
        Ok(Self { spec, jumps })
    }

    pub fn spec(&self) -> &SyntheticCrossingSpec {
        &self.spec
    }

    /// `(q, q')`
    fn q(&self, s: f64) -> (f64, f64) {
        if self.spec.coupled {
            (0.5, 0.0)
        } else {
            (0.3 + 0.4 * s, 0.4)
        }
    }

    /// `(w, w')`
    fn w(&self, s: f64) -> (f64, f64) {
        if self.spec.coupled {
            (0.2 + 0.5 * s, 0.5)
        } else {
            (0.4, 0.0)
        }
    }

    /// Slow rate `λ(s)` and its derivative.
    pub fn slow_rate(&self, s: f64) -> Result<(f64, f64)> {
        let x = s - self.spec.s_star;
        let SyntheticCrossingSpec { alpha, v, .. } = self.spec;
        let lam = v * x.abs().powf(alpha);
        let dlam = if x == 0.0 {
            if alpha > 1.0 {
                0.0
            } else if alpha == 1.0 {
                // one-sided value towards the interior of [0, 1]
                if self.spec.s_star >= 1.0 { -v } else { v }
            } else {
                return Err(AdiaError::GapTooSmall { s, gap: 0.0, threshold: 0.0 });
            }
        } else {
            v * alpha * x.abs().powf(alpha - 1.0) * x.signum()
        };
        Ok((lam, dlam))
    }

    fn rates(&self, s: f64) -> Result<([f64; 6], [f64; 6])> {
        let k = self.spec.kappa;
        let (q, dq) = self.q(s);
        let (w, dw) = self.w(s);
        let (l, dl) = self.slow_rate(s)?;
        let r = [k * (1.0 - q), k * q, l * w, l * w, l * (1.0 - w) * q, l * (1.0 - w) * (1.0 - q)];
        let dr = [
            -k * dq,
            k * dq,
            dl * w + l * dw,
            dl * w + l * dw,
            dl * (1.0 - w) * q - l * dw * q + l * (1.0 - w) * dq,
            dl * (1.0 - w) * (1.0 - q) - l * dw * (1.0 - q) - l * (1.0 - w) * dq,
        ];
        Ok((r, dr))
    }

    fn combine(&self, coeffs: &[f64; 6]) -> Superoperator {
        let mut out = Superoperator::zeros(3);
        for (r, j) in coeffs.iter().zip(&self.jumps) {
            if *r != 0.0 {
                out = &out + &j.scale(*r);
            }
        }
        out
    }

    pub fn stationary(&self, s: f64) -> [f64; 3] {
        let (q, _) = self.q(s);
        let (w, _) = self.w(s);
        [q * (1.0 - w), (1.0 - q) * (1.0 - w), w]
    }
}

impl LiouvillianFamily for SyntheticCrossing {
    fn name(&self) -> &str {
        "synthetic_crossing"
    }

    fn hilbert_dim(&self) -> usize {
        3
    }

    fn params(&self) -> serde_json::Value {
        serde_json::to_value(&self.spec).unwrap_or_default()
    }

    fn generator(&self, s: f64) -> Result<Superoperator> {
        check_unit_interval(s)?;
        Ok(self.combine(&self.rates(s)?.0))
    }

    fn generator_derivative(&self, s: f64) -> Option<Result<Superoperator>> {
        Some(self.rates(s).map(|(_, dr)| self.combine(&dr)))
    }

    fn reference_state(&self, s: f64) -> Option<Result<DensityMatrix>> {
        let p = self.stationary(s);
        let mut m = QOperator::zeros(3).into_matrix();
        for k in 0..3 {
            m[[k, k]] = c(p[k]);
        }
        Some(DensityMatrix::new(QOperator::from_matrix_unchecked(m)))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyShift {
    /// Superoperator `K = −i[H, ·]` on `d²`-vectors.
    #[default]
    None,
    /// `−i(H − E₀)` acting on Hilbert-space vectors.
    GroundEnergy,
}

/// Closed-system family with polynomial Hamiltonian `H(s) = Σ_k s^k H_k`.
#[derive(Clone, Debug)]
pub struct ClosedSystem {
    terms: Vec<QOperator>,
    shift: EnergyShift,
    label: serde_json::Value,
}

impl ClosedSystem {
    pub fn new(terms: Vec<QOperator>, shift: EnergyShift) -> Result<Self> {
        let d = terms.first().map(|t| t.dim()).ok_or_else(|| {
            AdiaError::InvalidParameter("closed-system family needs at least one term".into())
        })?;
        for t in &terms {
            if t.dim() != d {
                return Err(AdiaError::DimensionMismatch { expected: d, found: t.dim() });
            }
            t.require_hermitian(1e-12)?;
        }
        Ok(Self { terms, shift, label: json!({ "dim": d }) })
    }

    /// `H(s) = sweep·(s − ½)σᶻ + coupling·σˣ`
    pub fn landau_zener(sweep: f64, coupling: f64, shift: EnergyShift) -> Result<Self> {
        let h0 = &(&pauli::sz() * (-0.5 * sweep)) + &(&pauli::sx() * coupling);
        let h1 = &pauli::sz() * sweep;
        let mut f = Self::new(vec![h0, h1], shift)?;
        f.label = json!({ "landau_zener": { "sweep": sweep, "coupling": coupling }, "shift": shift });
        Ok(f)
    }

    pub fn shift(&self) -> EnergyShift {
        self.shift
    }

    pub fn hamiltonian_at(&self, s: f64) -> QOperator {
        let mut h = QOperator::zeros(self.terms[0].dim());
        for (k, t) in self.terms.iter().enumerate() {
            h = &h + &(t * s.powi(k as i32));
        }
        h
    }

    pub fn hamiltonian_derivative_at(&self, s: f64) -> QOperator {
        let mut h = QOperator::zeros(self.terms[0].dim());
        for (k, t) in self.terms.iter().enumerate().skip(1) {
            h = &h + &(t * (k as f64 * s.powi(k as i32 - 1)));
        }
        h
    }

    /// Ground energy and a normalized ground vector.
    pub fn ground(&self, s: f64) -> Result<(f64, ndarray::Array1<C64>)> {
        let (e, v) = self.hamiltonian_at(s).eigh()?;
        Ok((e[0], v.column(0).to_owned()))
    }

    fn shifted(&self, h: &QOperator) -> Superoperator {
        let mat = h.matrix().mapv(|z| -I * z);
        Superoperator::with_space(h.dim(), mat, StateSpace::Hilbert)
            .expect("Hilbert-space generator has matching shape")
    }
}

impl LiouvillianFamily for ClosedSystem {
    fn name(&self) -> &str {
        "closed_system"
    }

    fn hilbert_dim(&self) -> usize {
        self.terms[0].dim()
    }

    fn space(&self) -> StateSpace {
        match self.shift {
            EnergyShift::None => StateSpace::Liouville,
            EnergyShift::GroundEnergy => StateSpace::Hilbert,
        }
    }

    fn params(&self) -> serde_json::Value {
        self.label.clone()
    }

    fn hilbert_data(&self, s: f64) -> Option<Result<HilbertData>> {
        Some(Ok(HilbertData { hamiltonian: self.hamiltonian_at(s), lindblad_ops: vec![] }))
    }

    fn hilbert_derivative(&self, s: f64) -> Option<Result<HilbertData>> {
        Some(Ok(HilbertData { hamiltonian: self.hamiltonian_derivative_at(s), lindblad_ops: vec![] }))
    }

    fn generator(&self, s: f64) -> Result<Superoperator> {
        check_unit_interval(s)?;
        let h = self.hamiltonian_at(s);
        match self.shift {
            EnergyShift::None => lindbladian(&h, &[]),
            EnergyShift::GroundEnergy => {
                let (e0, _) = self.ground(s)?;
                let d = h.dim();
                Ok(self.shifted(&(&h - &(&QOperator::identity(d) * e0))))
            }
        }
    }

    fn generator_derivative(&self, s: f64) -> Option<Result<Superoperator>> {
        let dh = self.hamiltonian_derivative_at(s);
        Some(match self.shift {
            EnergyShift::None => hamiltonian_superop(&dh),
            EnergyShift::GroundEnergy => self.ground(s).map(|(_, g)| {
                // Hellmann–Feynman: E₀' = ⟨g|H'|g⟩
                let de0 = g.mapv(|z| z.conj()).dot(&dh.matrix().dot(&g)).re;
                let d = dh.dim();
                self.shifted(&(&dh - &(&QOperator::identity(d) * de0)))
            }),
        })
    }

    fn reference_state(&self, s: f64) -> Option<Result<DensityMatrix>> {
        Some(self.ground(s).and_then(|(_, g)| DensityMatrix::new(QOperator::outer(&g, &g))))
    }
}

/// A time-independent generator.
#[derive(Clone, Debug)]
pub struct ConstantFamily {
    l: Superoperator,
    label: serde_json::Value,
}

impl ConstantFamily {
    pub fn new(l: Superoperator) -> Self {
        Self { label: json!({ "size": l.size() }), l }
    }

    /// Qubit amplitude damping `D[√(2γ)σ⁻]` with a fixed Hamiltonian `m·σ`.
    pub fn amplitude_damping(m: [f64; 3], gamma: f64) -> Result<Self> {
        let l = lindbladian(&pauli::bloch(m), &[&pauli::sigma_minus() * (2.0 * gamma).sqrt()])?;
        Ok(Self { l, label: json!({ "bloch": m, "gamma": gamma }) })
    }
}

impl LiouvillianFamily for ConstantFamily {
    fn name(&self) -> &str {
        "constant"
    }

    fn hilbert_dim(&self) -> usize {
        self.l.dim()
    }

    fn params(&self) -> serde_json::Value {
        self.label.clone()
    }

    fn generator(&self, s: f64) -> Result<Superoperator> {
        check_unit_interval(s)?;
        Ok(self.l.clone())
    }

    fn generator_derivative(&self, _s: f64) -> Option<Result<Superoperator>> {
        Some(Ok(self.l.zeros_like()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LandauZenerSpec {
    pub sweep: f64,
    pub coupling: f64,
    pub shift: EnergyShift,
}

impl Default for LandauZenerSpec {
    fn default() -> Self {
        Self { sweep: 4.0, coupling: 0.5, shift: EnergyShift::GroundEnergy }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QubitDampingSpec {
    pub bloch: [f64; 3],
    pub gamma: f64,
    /// Rotation axis (times angle) for the unitary family.
    pub rotation: [f64; 3],
}

impl Default for QubitDampingSpec {
    fn default() -> Self {
        Self { bloch: [0.3, 0.0, 0.2], gamma: 0.5, rotation: [0.0, 0.0, 0.7] }
    }
}

/// JSON description of a family: `{"name": "<family>", ...parameters}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FamilySpec {
    Example1(Example1),
    Example2(Example2Params),
    SyntheticCrossing(SyntheticCrossingSpec),
    LandauZener(LandauZenerSpec),
    Constant(QubitDampingSpec),
    Unitary(QubitDampingSpec),
}

impl FamilySpec {
    pub fn build(&self) -> Result<Box<dyn LiouvillianFamily>> {
        Ok(match self {
            FamilySpec::Example1(p) => {
                p.validate()?;
                Box::new(p.clone())
            }
            FamilySpec::Example2(p) => Box::new(Example2::new(p.clone())?),
            FamilySpec::SyntheticCrossing(p) => Box::new(SyntheticCrossing::new(p.clone())?),
            FamilySpec::LandauZener(p) => Box::new(ClosedSystem::landau_zener(p.sweep, p.coupling, p.shift)?),
            FamilySpec::Constant(p) => Box::new(ConstantFamily::amplitude_damping(p.bloch, p.gamma)?),
            FamilySpec::Unitary(p) => {
                let base = ConstantFamily::amplitude_damping(p.bloch, p.gamma)?;
                Box::new(UnitaryFamily::qubit_rotation(base.l, p.rotation)?)
            }
        })
    }

    /// Whether the family has a gap bounded away from zero on `[0, 1]`.
    pub fn is_gapped(&self) -> bool {
        match self {
            FamilySpec::Example2(p) => p.coupling != CouplingAxis::Z,
            FamilySpec::SyntheticCrossing(_) => false,
            _ => true,
        }
    }
}
