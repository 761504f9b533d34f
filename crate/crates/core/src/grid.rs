//! Uniform angular grids on [−π, π) and periodic trapezoidal quadrature.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform grid of angles θ_j = −π + j·2π/size for j = 0..size−1.
///
/// Together with the constant weight 2π/size the nodes form the periodic
/// trapezoidal rule, which is exact for trigonometric polynomials of degree
/// below size/2 and spectrally accurate for smooth periodic integrands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularGrid {
    size: usize,
}

impl AngularGrid {
    /// Default resolution for library operations.
    pub const DEFAULT_SIZE: usize = 4096;

    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::Invalid(format!(
                "grid size must be at least 2, got {size}"
            )));
        }
        Ok(Self { size })
    }

    pub fn default_grid() -> Self {
        Self {
            size: Self::DEFAULT_SIZE,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Quadrature weight 2π/size shared by every node.
    pub fn weight(&self) -> f64 {
        2.0 * PI / self.size as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        debug_assert!(j < self.size);
        -PI + j as f64 * self.weight()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.size).map(|j| self.node(j))
    }

    /// ∫ f dθ over [−π, π) from samples at the grid nodes.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.size);
        values.iter().sum::<f64>() * self.weight()
    }
}

/// Row-major table of cos(kθ_j) for k = 0..order, j over the grid, built with
/// the Chebyshev recurrence cos(kθ) = 2cos(θ)cos((k−1)θ) − cos((k−2)θ).
pub(crate) fn cosine_table(grid: &AngularGrid, order: usize) -> Vec<f64> {
    let m = grid.size();
    let mut table = vec![0.0; (order + 1) * m];
    for (j, theta) in grid.nodes().enumerate() {
        table[j] = 1.0;
        if order >= 1 {
            table[m + j] = theta.cos();
        }
        for k in 2..=order {
            table[k * m + j] = 2.0 * table[m + j] * table[(k - 1) * m + j] - table[(k - 2) * m + j];
        }
    }
    table
}
