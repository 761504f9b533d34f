//! Command-line surface: run configuration, the five commands, and the
//! Monte Carlo validation harness.

pub mod commands;
pub mod config;
pub mod validate;

pub use commands::{cmd_bounds, cmd_estimate, cmd_maxent, cmd_simulate, cmd_validate, Invocation};
pub use config::{
    AssessmentKind, BoundsConfig, EstimateConfig, MaxentConfig, MultiProblemConfig, RunConfig,
    ScenarioConfig, SimulateConfig, ValidateConfig,
};
pub use validate::{
    run_finite_sample_scenario, run_kl_lower_scenario, run_noise_scenario, run_scenario,
    ValidationReport, VALIDATION_SCHEMA,
};
