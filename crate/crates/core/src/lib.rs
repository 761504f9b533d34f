//! Rational spectral density estimation from covariance lags, with
//! quantitative error bounds.
//!
//! The library estimates a spectral density Φ = P/Q from a finite window of
//! covariance lags by convex duality, so that the lags of the estimate match
//! the window exactly. On top of the estimator it provides:
//!
//! - maximum-entropy densities under exact and box-constrained moment
//!   constraints,
//! - total-variation upper bounds on the estimation error under additive
//!   noise and under finite samples, and a cepstral KL lower bound, all
//!   assembled into auditable [`bounds::BoundReport`]s,
//! - a simulation and lag-estimation layer with interval-probability
//!   assessments, and a Monte Carlo validation harness,
//! - a two-dimensional generalization over product grids.
//!
//! Conventions (fixed across the crate): lags carry the 1/2π normalization
//! r_k = (1/2π)∫cos(kθ)Φ dθ; polynomials and exponents use the real cosine
//! form c₀ + 2Σ c_k cos kθ; entropy is −∫Φ log Φ dθ; total variation is the
//! Kolmogorov-style sup of cumulative differences. Spectral densities are
//! not probability densities, so KL between unequal masses may be negative;
//! reports carry caveats wherever that matters.

pub mod bounds;
pub mod cli;
pub mod covariance;
pub mod density;
pub mod error;
pub mod estimator;
pub mod grid;
pub mod maxent;
pub mod multivariate;
pub mod options;
pub mod poly;
pub mod sampling;

mod linalg;
mod newton;

pub use covariance::{toeplitz_positive_definite, CovarianceSequence};
pub use density::GridDensity;
pub use error::{Error, Result};
pub use estimator::{
    dual_value_and_gradient, solve_dual, solve_dual_from, EstimatorProblem, RationalDensity,
};
pub use grid::AngularGrid;
pub use maxent::{
    maxent_entropy_identity_check, solve_maxent, solve_maxent_box, solve_maxent_from, LagBox,
    MaxEntDensity,
};
pub use options::SolverOptions;
pub use poly::TrigPolynomial;
