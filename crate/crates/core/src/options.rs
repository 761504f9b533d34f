//! Solver configuration shared by the estimator and maximum-entropy duals.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Relative gradient tolerance; convergence requires the gradient
    /// ∞-norm to drop below `tolerance`·r₀.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Default grid resolution for operations that build their own grid.
    pub grid_size: usize,
    /// Coordinate step tolerance for the box-constrained entropy search.
    pub step_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 200,
            grid_size: 4096,
            step_tol: 1e-6,
        }
    }
}
