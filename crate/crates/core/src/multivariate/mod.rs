//! Two-dimensional generalization over cosine-product bases at desk scale
//! (d ≤ 2, per-axis grid ≤ 256, basis of at most 9 functions).

mod basis;
mod bounds;
mod density;
mod series;
mod solver;

pub use basis::{MultiBasis, MAX_AXIS_GRID, MAX_BASIS_INDEX, MAX_DIMENSION};
pub use bounds::{multi_finite_sample_bound, multi_kl_lower_bound, multi_noise_tv_bound};
pub use density::{MultiGrid, MultiGridDensity};
pub use series::{simulate_multi, MultiSampleSeries};
pub use solver::{
    multi_solve_dual, multi_solve_maxent, multi_solve_maxent_box, MultiBoxMaxEnt, MultiMaxEnt,
    MultiPolynomial, MultiRational,
};
