//! Experiment configuration files.

use std::path::Path;

use adiakit::bounds::{BoundConfig, FitWindow};
use adiakit::models::FamilySpec;
use adiakit::propagate::PropagatorConfig;
use adiakit::SpectralConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Log-spaced ladder of total times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ladder {
    pub log_min: f64,
    pub log_max: f64,
    pub count: usize,
}

impl Default for Ladder {
    fn default() -> Self {
        Self { log_min: 2.0, log_max: 6.0, count: 13 }
    }
}

impl Ladder {
    pub fn values(&self) -> Vec<f64> {
        adiakit::log_ladder(self.log_min, self.log_max, self.count)
    }

    fn validate(&self, what: &str) -> Result<(), ConfigError> {
        let ok = self.count >= 1
            && self.log_min.is_finite()
            && self.log_max.is_finite()
            && (self.count == 1 || self.log_max > self.log_min);
        if ok {
            Ok(())
        } else {
            Err(ConfigError::Invalid(format!(
                "{what}: ladder must be strictly increasing (log_min {} < log_max {}, count {} ≥ 1)",
                self.log_min, self.log_max, self.count
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub log_min: f64,
    pub log_max: f64,
    pub count: usize,
    pub fit: FitWindow,
}

impl Default for SweepSection {
    fn default() -> Self {
        let l = Ladder::default();
        Self { log_min: l.log_min, log_max: l.log_max, count: l.count, fit: FitWindow::Upper }
    }
}

impl SweepSection {
    pub fn ladder(&self) -> Ladder {
        Ladder { log_min: self.log_min, log_max: self.log_max, count: self.count }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub points: usize,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self { points: 201 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    /// Ladder for the bound-validity check.
    pub bound_ladder: Ladder,
    pub grid_points: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { bound_ladder: Ladder { log_min: 2.0, log_max: 4.0, count: 5 }, grid_points: 21 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    /// Prefix for every file written into the output directory.
    pub prefix: String,
    pub plot_scripts: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self { prefix: String::new(), plot_scripts: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub propagator: PropagatorConfig,
    pub spectral: SpectralConfig,
    pub bound: BoundConfig,
    /// Relative accuracy of the generator table; `null` evaluates directly.
    pub tabulate: Option<f64>,
    /// Multiplier on C/T in bound verdicts.
    pub safety: f64,
    /// Absolute slack added to `safety·C/T`, covering roundoff when C = 0.
    pub bound_floor: f64,
    pub checks: CheckTolerances,
}

/// Pass thresholds for the `verify` suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckTolerances {
    pub cptp: f64,
    pub intertwining: f64,
    /// Relative to `‖L‖₂`.
    pub semisimplicity: f64,
    pub kms: f64,
    /// Relative to the spectral radius.
    pub closed_form: f64,
}

impl Default for CheckTolerances {
    fn default() -> Self {
        Self { cptp: 1e-6, intertwining: 1e-6, semisimplicity: 1e-9, kms: 1e-10, closed_form: 1e-8 }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            propagator: PropagatorConfig::default(),
            spectral: SpectralConfig::default(),
            bound: BoundConfig::default(),
            tabulate: Some(1e-13),
            safety: 2.0,
            bound_floor: 1e-10,
            checks: CheckTolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: FamilySpec,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug)]
pub enum ConfigError {
    Io(String),
    Parse { line: usize, column: usize, message: String },
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Io(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Parse { line, column, message } => {
                write!(f, "config error at line {line}, column {column}: {message}")
            }
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.sweep.ladder().validate("sweep")?;
        self.verify.bound_ladder.validate("verify.bound_ladder")?;
        if self.spectrum.points < 2 {
            return Err(ConfigError::Invalid("spectrum.points must be at least 2".into()));
        }
        if !(self.tolerances.safety > 0.0) {
            return Err(ConfigError::Invalid("tolerances.safety must be positive".into()));
        }
        if !(self.tolerances.bound_floor >= 0.0) {
            return Err(ConfigError::Invalid("tolerances.bound_floor must be non-negative".into()));
        }
        if let Some(t) = self.tolerances.tabulate {
            if !(t > 0.0) {
                return Err(ConfigError::Invalid("tolerances.tabulate must be positive".into()));
            }
        }
        Ok(())
    }

    /// Applies the `--seed` override to every randomized component.
    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(s) = seed {
            self.seed = s;
        }
        self.tolerances.bound.norm.seed = self.seed;
        self
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

fn strip_position(message: &str) -> String {
    match message.rsplit_once(" at line ") {
        Some((head, _)) => head.to_string(),
        None => message.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"family": {"name": "example1"}}"#).unwrap();
        assert_eq!(cfg.sweep.ladder(), Ladder::default());
        assert_eq!(cfg.sweep.ladder().values().len(), 13);
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = ExperimentConfig::from_json("{\n  \"family\": {\"name\": \"example1\"},\n  \"bogus\": 1\n}").unwrap_err();
        match err {
            ConfigError::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decreasing_ladder_is_rejected() {
        let text = r#"{"family": {"name": "example1"}, "sweep": {"log_min": 4, "log_max": 2, "count": 3}}"#;
        assert!(matches!(ExperimentConfig::from_json(text), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn hash_tracks_content_and_seed() {
        let a = ExperimentConfig::from_json(r#"{"family": {"name": "example1"}}"#).unwrap().with_seed(None);
        let b = a.clone().with_seed(Some(7));
        assert_eq!(a.hash(), a.clone().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(b.tolerances.bound.norm.seed, 7);
    }
}
