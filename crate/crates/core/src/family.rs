//! The common evaluation interface for schedules `s ↦ L(s)`.

use serde::{Deserialize, Serialize};

use crate::error::{AdiaError, Result};
use crate::superop::{
    dissipator_derivative, hamiltonian_superop, lindbladian, DensityMatrix, QOperator, StateSpace,
    Superoperator,
};

/// Hamiltonian and Lindblad operators at one schedule point.
#[derive(Clone, Debug)]
pub struct HilbertData {
    pub hamiltonian: QOperator,
    pub lindblad_ops: Vec<QOperator>,
}

/// A differentiable schedule of generators on `s ∈ [0, 1]`.
///
/// Families either describe themselves through Hilbert-space data
/// (`hilbert_data`, optionally `hilbert_derivative`), in which case the
/// generator is assembled in Lindblad form, or override `generator`
/// directly.
pub trait LiouvillianFamily: Send + Sync {
    fn name(&self) -> &str;

    fn hilbert_dim(&self) -> usize;

    fn space(&self) -> StateSpace {
        StateSpace::Liouville
    }

    /// Parameter record, used for metadata and config round-trips.
    fn params(&self) -> serde_json::Value;

    fn hilbert_data(&self, _s: f64) -> Option<Result<HilbertData>> {
        None
    }

    fn hilbert_derivative(&self, _s: f64) -> Option<Result<HilbertData>> {
        None
    }

    /// System Hamiltonian (without any Lamb shift), when defined.
    fn hamiltonian(&self, s: f64) -> Option<Result<QOperator>> {
        self.hilbert_data(s).map(|r| r.map(|d| d.hamiltonian))
    }

    fn hamiltonian_derivative(&self, s: f64) -> Option<Result<QOperator>> {
        self.hilbert_derivative(s).map(|r| r.map(|d| d.hamiltonian))
    }

    /// Inverse temperature for thermal families.
    fn beta(&self) -> Option<f64> {
        None
    }

    /// Exact instantaneous steady state, when the family knows it in closed
    /// form. Also serves as the continuous extension at points where the
    /// kernel grows.
    fn reference_state(&self, _s: f64) -> Option<Result<DensityMatrix>> {
        None
    }

    fn generator(&self, s: f64) -> Result<Superoperator> {
        match self.hilbert_data(s) {
            Some(data) => {
                let data = data?;
                lindbladian(&data.hamiltonian, &data.lindblad_ops)
            }
            None => Err(AdiaError::InvalidParameter(format!(
                "family {} defines neither Hilbert data nor a generator",
                self.name()
            ))),
        }
    }

    /// Analytic `L'(s)`, if the family knows it.
    fn generator_derivative(&self, s: f64) -> Option<Result<Superoperator>> {
        let data = self.hilbert_data(s)?;
        let deriv = self.hilbert_derivative(s)?;
        Some((|| {
            let data = data?;
            let deriv = deriv?;
            let k = hamiltonian_superop(&deriv.hamiltonian)?;
            let dis = dissipator_derivative(
                self.hilbert_dim(),
                &data.lindblad_ops,
                &deriv.lindblad_ops,
            )?;
            Ok(&k + &dis)
        })())
    }
}

pub(crate) fn check_unit_interval(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(AdiaError::OutOfRange(s))
    }
}

/// `L(s)` for `s ∈ [0, 1]`.
pub fn assemble_liouvillian(family: &dyn LiouvillianFamily, s: f64) -> Result<Superoperator> {
    check_unit_interval(s)?;
    family.generator(s)
}

/// Polynomial schedule `Σ_k c_k s^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule {
    pub coeffs: Vec<f64>,
}

impl Schedule {
    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `a + b s`
    pub fn linear(a: f64, b: f64) -> Self {
        Self { coeffs: vec![a, b] }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * s + k as f64 * c)
    }
}
