//! Statistical layer: process simulation, sample lag estimation, and
//! interval-probability assessments for the finite-sample bounds.

mod model;
mod probability;
mod series;

pub use model::{simulate, ProcessModel};
pub use probability::{
    assess_box_marginal, derive_seed, marginal_interval_probability, moment_interval_probability,
    monte_carlo_interval_probability, wilson_interval, AssessmentMethod, LagInterval, MomentMethod,
    PairDistribution, ProbabilityAssessment,
};
pub use series::{SampleSeries, SeriesMeta};
