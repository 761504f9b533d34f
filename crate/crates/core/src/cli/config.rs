//! Run configuration: JSON file with per-command blocks, strict about
//! unknown keys and desk-scale caps.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::options::SolverOptions;
use crate::sampling::ProcessModel;

/// Univariate grids beyond this are outside desk scale.
pub const MAX_GRID_SIZE: usize = 65536;
pub const MIN_MC_TRIALS: usize = 100;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid_size: Option<usize>,
    pub order: Option<usize>,
    pub seed: Option<u64>,
    pub solver: Option<SolverOptions>,
    pub estimate: Option<EstimateConfig>,
    pub maxent: Option<MaxentConfig>,
    pub bounds: Option<BoundsConfig>,
    pub simulate: Option<SimulateConfig>,
    pub validate: Option<ValidateConfig>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    /// Inline lag window r0..rn.
    pub lags: Option<Vec<f64>>,
    /// Prior numerator coefficients; omitted means P ≡ 1.
    pub prior: Option<Vec<f64>>,
    /// Sample CSV to estimate lags from (requires `order`).
    pub input: Option<PathBuf>,
    /// Multivariate problem instead of the univariate fields above.
    pub multivariate: Option<MultiProblemConfig>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxentConfig {
    pub lags: Option<Vec<f64>>,
    pub input: Option<PathBuf>,
    pub multivariate: Option<MultiProblemConfig>,
}

/// Multivariate problem: basis exponent vectors plus moments, or a d-column
/// sample CSV the moments are estimated from.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiProblemConfig {
    pub basis: Vec<Vec<u32>>,
    pub moments: Option<Vec<f64>>,
    pub input: Option<PathBuf>,
    pub prior: Option<Vec<f64>>,
    pub axis_grid: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundsConfig {
    /// Additive-noise TV upper bound from exact clean and noise lag windows.
    Noise {
        clean_lags: Vec<f64>,
        noise_lags: Vec<f64>,
        #[serde(default)]
        prior: Option<Vec<f64>>,
    },
    /// Finite-sample TV upper bound over a delta-box around the clean lags.
    FiniteSample {
        clean_lags: Vec<f64>,
        delta: f64,
        n_samples: usize,
        model: ProcessModel,
        #[serde(default)]
        assessment: AssessmentKind,
        #[serde(default)]
        trials: Option<usize>,
    },
    /// Cepstral KL lower bound for a known true model over a delta-box.
    KlLower {
        model: ProcessModel,
        order: usize,
        delta: f64,
        #[serde(default)]
        n_samples: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssessmentKind {
    #[default]
    Marginal,
    Cantelli,
    Markov,
    MonteCarlo,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub model: ProcessModel,
    pub length: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    pub scenario: ScenarioConfig,
    /// Largest acceptable violation rate (e.g. 0.01).
    #[serde(default = "default_allowance")]
    pub allowance: f64,
}

fn default_allowance() -> f64 {
    0.01
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioConfig {
    /// Per-trial noisy sample paths; the empirical TV to the true density
    /// must stay below the deterministic noise bound.
    Noise {
        model: ProcessModel,
        noise_variance: f64,
        order: usize,
        n_samples: usize,
        trials: usize,
        #[serde(default)]
        prior: Option<Vec<f64>>,
    },
    /// Box-coverage frequencies across sample sizes plus bound monotonicity
    /// across nested boxes.
    FiniteSample {
        model: ProcessModel,
        order: usize,
        delta: f64,
        n_samples_list: Vec<usize>,
        trials: usize,
        #[serde(default)]
        nested_deltas: Option<Vec<f64>>,
        /// Sample size used for the probability assessment in the bound.
        #[serde(default)]
        assessment_n: Option<usize>,
    },
    /// Per-trial KL distances against the printed lower bound, counted only
    /// when the bound is positive; vacuous bounds are flagged.
    KlLower {
        model: ProcessModel,
        order: usize,
        delta: f64,
        n_samples: usize,
        trials: usize,
    },
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfig = serde_json::from_str(&text)?;
        config.validate_caps()?;
        Ok(config)
    }

    pub fn validate_caps(&self) -> Result<()> {
        if let Some(g) = self.grid_size {
            if !(2..=MAX_GRID_SIZE).contains(&g) {
                return Err(Error::Invalid(format!(
                    "grid_size must be in 2..={MAX_GRID_SIZE}, got {g}"
                )));
            }
            if let Some(n) = self.order {
                if 2 * n >= g {
                    return Err(Error::Aliasing { order: n, grid: g });
                }
            }
        }
        if let Some(v) = &self.validate {
            if !(0.0..=1.0).contains(&v.allowance) {
                return Err(Error::Invalid(format!(
                    "allowance must be in [0, 1], got {}",
                    v.allowance
                )));
            }
            let trials = match &v.scenario {
                ScenarioConfig::Noise { trials, .. }
                | ScenarioConfig::FiniteSample { trials, .. }
                | ScenarioConfig::KlLower { trials, .. } => *trials,
            };
            if trials < MIN_MC_TRIALS {
                return Err(Error::Invalid(format!(
                    "validation needs at least {MIN_MC_TRIALS} trials, got {trials}"
                )));
            }
        }
        if let Some(BoundsConfig::FiniteSample { delta, trials, .. }) = &self.bounds {
            if *delta <= 0.0 {
                return Err(Error::Invalid("delta must be positive".into()));
            }
            if let Some(t) = trials {
                if *t < MIN_MC_TRIALS {
                    return Err(Error::Invalid(format!(
                        "monte carlo assessment needs at least {MIN_MC_TRIALS} trials"
                    )));
                }
            }
        }
        if let Some(s) = &self.simulate {
            if s.length < 2 {
                return Err(Error::Invalid("simulation length must be at least 2".into()));
            }
        }
        Ok(())
    }

    pub fn grid_size_or_default(&self) -> usize {
        self.grid_size
            .unwrap_or(crate::grid::AngularGrid::DEFAULT_SIZE)
    }

    pub fn solver_or_default(&self) -> SolverOptions {
        self.solver.unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"grid_sizes": 512}"#);
        assert!(err.is_err());
    }

    #[test]
    fn caps_enforced() {
        let c: RunConfig =
            serde_json::from_str(r#"{"grid_size": 1048576}"#).unwrap();
        assert!(c.validate_caps().is_err());
        let c: RunConfig = serde_json::from_str(r#"{"grid_size": 64, "order": 32}"#).unwrap();
        assert!(c.validate_caps().is_err());
        let c: RunConfig = serde_json::from_str(r#"{"grid_size": 2048, "order": 2}"#).unwrap();
        assert!(c.validate_caps().is_ok());
    }

    #[test]
    fn scenario_round_trip() {
        let text = r#"{
            "seed": 7,
            "validate": {
                "allowance": 0.01,
                "scenario": {
                    "bound": "noise",
                    "model": {"kind": "ar", "coeffs": [0.5], "innovation_variance": 1.0},
                    "noise_variance": 0.25,
                    "order": 2,
                    "n_samples": 1000,
                    "trials": 100
                }
            }
        }"#;
        let c: RunConfig = serde_json::from_str(text).unwrap();
        c.validate_caps().unwrap();
        assert!(matches!(
            c.validate.unwrap().scenario,
            ScenarioConfig::Noise { .. }
        ));
    }

    #[test]
    fn trials_floor_enforced() {
        let text = r#"{
            "validate": {
                "scenario": {
                    "bound": "kl_lower",
                    "model": {"kind": "white_gaussian", "variance": 1.0},
                    "order": 1, "delta": 0.05, "n_samples": 100, "trials": 5
                }
            }
        }"#;
        let c: RunConfig = serde_json::from_str(text).unwrap();
        assert!(c.validate_caps().is_err());
    }
}
