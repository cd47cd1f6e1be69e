//! Numerical toolkit for adiabatic evolution under slowly varying
//! Lindblad generators.
//!
//! The crate is organised bottom-up: [`superop`] builds generators,
//! [`spectral`] extracts projectors and resolvents, [`propagate`] solves the
//! time-ordered evolution, [`davies`] constructs weak-coupling generators
//! and [`bounds`] evaluates error bounds, expansion terms and scaling fits.

pub mod bounds;
pub mod davies;
pub mod error;
pub mod family;
pub mod linalg;
pub mod models;
pub mod norm;
pub mod propagate;
pub mod quadrature;
pub mod spectral;
pub mod superop;
pub mod sweep;
pub mod tabulate;

pub use num_complex::Complex64 as C64;

pub use error::{AdiaError, Result};
pub use family::{assemble_liouvillian, HilbertData, LiouvillianFamily, Schedule};
pub use spectral::{
    decompose, reduced_resolvent, semisimplicity_defect, zero_projector, SpectralConfig,
    SpectralData,
};
pub use superop::{
    hamiltonian_superop, lindbladian, DensityMatrix, QOperator, StateSpace, Superoperator,
};
pub use propagate::{
    adiabatic_error, intertwiner_euler, intertwiner_ode, propagate, v_nonpositivity_witness,
    EvolutionRecord, Method, PropagatorConfig,
};
pub use bounds::{
    adiabatic_time_estimate, constant_c, crossing_scan, expansion_terms, fit_power_law,
    kms_pprime_bound, BoundReport, CrossingReport, FitWindow, PowerLawFit,
};
pub use sweep::{log_ladder, run_sweep, SweepConfig, SweepResult, SweepRow};
