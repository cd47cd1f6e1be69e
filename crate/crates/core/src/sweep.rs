//! Error sweeps over a ladder of total times.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{fit_power_law, FitWindow, PowerLawFit};
use crate::error::{AdiaError, Result};
use crate::family::LiouvillianFamily;
use crate::propagate::{adiabatic_error_with, adiabatic_setup, PropagatorConfig};
use crate::spectral::SpectralConfig;
use crate::tabulate::TabulatedFamily;

/// `count` values of `T` evenly spaced in `log10 T` over `[min_exp, max_exp]`.
pub fn log_ladder(min_exp: f64, max_exp: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![10f64.powf(min_exp)],
        _ => (0..count)
            .map(|k| 10f64.powf(min_exp + (max_exp - min_exp) * k as f64 / (count - 1) as f64))
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub propagator: PropagatorConfig,
    pub spectral: SpectralConfig,
    /// Serve generators from a Chebyshev table with this relative accuracy.
    pub tabulate: Option<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { propagator: PropagatorConfig::default(), spectral: SpectralConfig::default(), tabulate: Some(1e-13) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: f64,
    pub error: f64,
    pub steps: usize,
    pub discrepancy: f64,
    /// Set when the integrator did not reach its tolerance; `error` is NaN.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub family: String,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// `(T, error)` for unflagged rows.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.rows.iter().filter(|r| !r.flagged).map(|r| (r.t, r.error)).collect()
    }

    pub fn fit(&self, window: FitWindow) -> Result<PowerLawFit> {
        fit_power_law(&self.points(), window)
    }
}

/// Adiabatic error at every `T` of the ladder; rows are computed in
/// parallel and returned in ladder order.
pub fn run_sweep(family: &dyn LiouvillianFamily, ladder: &[f64], cfg: &SweepConfig) -> Result<SweepResult> {
    let tabulated;
    let fam: &dyn LiouvillianFamily = match cfg.tabulate {
        Some(tol) => {
            tabulated = TabulatedFamily::new(family, tol)?;
            &tabulated
        }
        None => family,
    };
    let setup = adiabatic_setup(fam, &cfg.spectral)?;
    let rows = ladder
        .par_iter()
        .map(|&t| match adiabatic_error_with(fam, &setup, t, &cfg.propagator) {
            Ok(r) => Ok(SweepRow { t, error: r.error, steps: r.steps, discrepancy: r.discrepancy, flagged: false }),
            Err(AdiaError::NonConvergence { discrepancy, steps }) => {
                log::warn!("T = {t:e}: integrator did not converge ({discrepancy:.2e} after {steps} steps)");
                Ok(SweepRow { t, error: f64::NAN, steps, discrepancy, flagged: true })
            }
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { family: family.name().to_string(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Example1;

    #[test]
    fn ladder_endpoints() {
        let l = log_ladder(2.0, 6.0, 13);
        assert_eq!(l.len(), 13);
        assert!((l[0] - 100.0).abs() < 1e-9);
        assert!((l[12] - 1e6).abs() < 1e-3);
        assert!(log_ladder(1.0, 2.0, 0).is_empty());
    }

    #[test]
    fn sweep_is_ordered_and_flags_nonconvergence() {
        let f = Example1::default();
        let ladder = log_ladder(1.0, 2.0, 3);
        let r = run_sweep(&f, &ladder, &SweepConfig::default()).unwrap();
        assert_eq!(r.rows.iter().map(|r| r.t).collect::<Vec<_>>(), ladder);
        assert!(r.rows.windows(2).all(|w| w[1].error < w[0].error));
        let cfg = SweepConfig {
            propagator: PropagatorConfig { tolerance: Some(1e-30), max_steps: 64, ..Default::default() },
            ..Default::default()
        };
        let r = run_sweep(&f, &ladder, &cfg).unwrap();
        assert!(r.rows.iter().all(|r| r.flagged && r.error.is_nan()));
        assert!(r.points().is_empty());
    }

    #[test]
    fn tabulated_and_direct_sweeps_agree() {
        let f = Example1::default();
        let ladder = [300.0];
        let a = run_sweep(&f, &ladder, &SweepConfig::default()).unwrap();
        let b = run_sweep(&f, &ladder, &SweepConfig { tabulate: None, ..Default::default() }).unwrap();
        assert!((a.rows[0].error - b.rows[0].error).abs() < 1e-9);
    }
}
