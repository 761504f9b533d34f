//! Cosine-product basis functions over the product domain [−π, π)^d.
//!
//! Each basis function is β_k(θ) = Π_i cos(α_{k,i}·θ_i) for a vector of
//! nonnegative integer exponents α_k. The real cosine products mirror the
//! univariate convention; the k = 0 entry is always the constant function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::AngularGrid;
use crate::linalg;
use crate::multivariate::density::MultiGrid;

/// Desk-scale caps: these keep product-grid quadrature affordable.
pub const MAX_DIMENSION: usize = 2;
pub const MAX_BASIS_INDEX: usize = 8;
pub const MAX_AXIS_GRID: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiBasis {
    dimension: usize,
    exponents: Vec<Vec<u32>>,
}

/// Analytic inner product (1/2π)∫cos(aθ)cos(bθ)dθ.
fn axis_gram(a: u32, b: u32) -> f64 {
    if a != b {
        0.0
    } else if a == 0 {
        1.0
    } else {
        0.5
    }
}

impl MultiBasis {
    pub fn new(dimension: usize, exponents: Vec<Vec<u32>>) -> Result<Self> {
        if dimension == 0 || dimension > MAX_DIMENSION {
            return Err(Error::Invalid(format!(
                "dimension must be 1..={MAX_DIMENSION}, got {dimension}"
            )));
        }
        if exponents.is_empty() || exponents.len() > MAX_BASIS_INDEX + 1 {
            return Err(Error::Invalid(format!(
                "need 1..={} basis functions, got {}",
                MAX_BASIS_INDEX + 1,
                exponents.len()
            )));
        }
        if exponents.iter().any(|e| e.len() != dimension) {
            return Err(Error::Invalid(
                "every exponent vector must have one entry per dimension".into(),
            ));
        }
        if exponents[0].iter().any(|&e| e != 0) {
            return Err(Error::Invalid(
                "basis entry 0 must be the all-zeros (constant) exponent".into(),
            ));
        }
        let basis = Self {
            dimension,
            exponents,
        };
        // linear independence: the analytic Gram matrix must be PD, which for
        // this orthogonal family reduces to exponent vectors being distinct
        let n1 = basis.len();
        let gram = basis.gram();
        if linalg::cholesky(&gram, n1, 1e-12).is_err() {
            return Err(Error::Invalid(
                "basis functions are linearly dependent (repeated exponent vector)".into(),
            ));
        }
        Ok(basis)
    }

    /// Full tensor basis with per-axis maximum exponents: every combination
    /// (j, k) with j ≤ orders[0], k ≤ orders[1], ordered lexicographically.
    pub fn tensor(orders: &[u32]) -> Result<Self> {
        match orders {
            [n] => Self::new(1, (0..=*n).map(|j| vec![j]).collect()),
            [n1, n2] => {
                let mut exps = Vec::new();
                for j in 0..=*n1 {
                    for k in 0..=*n2 {
                        exps.push(vec![j, k]);
                    }
                }
                Self::new(2, exps)
            }
            _ => Err(Error::Invalid("tensor basis needs 1 or 2 axis orders".into())),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn max_exponent_on_axis(&self, axis: usize) -> u32 {
        self.exponents.iter().map(|e| e[axis]).max().unwrap_or(0)
    }

    /// Analytic Gram matrix G_jk = (1/(2π)^d)∫β_j·β_k dθ.
    pub fn gram(&self) -> Vec<f64> {
        let n1 = self.len();
        let mut g = vec![0.0; n1 * n1];
        for j in 0..n1 {
            for k in 0..n1 {
                g[j * n1 + k] = (0..self.dimension)
                    .map(|i| axis_gram(self.exponents[j][i], self.exponents[k][i]))
                    .product();
            }
        }
        g
    }

    /// Rejects grids too coarse for the basis (per-axis size must be at least
    /// 4·(max exponent + 1)) or beyond the desk-scale cap.
    pub fn check_grid(&self, grid: &MultiGrid) -> Result<()> {
        if grid.dimension() != self.dimension {
            return Err(Error::GridMismatch(grid.dimension(), self.dimension));
        }
        for (axis, g) in grid.axes().iter().enumerate() {
            let need = 4 * (self.max_exponent_on_axis(axis) as usize + 1);
            if g.size() < need {
                return Err(Error::Aliasing {
                    order: self.max_exponent_on_axis(axis) as usize,
                    grid: g.size(),
                });
            }
            if g.size() > MAX_AXIS_GRID {
                return Err(Error::Invalid(format!(
                    "axis grid {} exceeds the desk-scale cap {MAX_AXIS_GRID}",
                    g.size()
                )));
            }
        }
        Ok(())
    }

    /// Value tables of every basis function on the flattened product grid,
    /// row k of length grid.len().
    pub fn tables(&self, grid: &MultiGrid) -> Vec<f64> {
        let total = grid.len();
        let mut out = vec![1.0; self.len() * total];
        // per-axis cosine values for the exponents that appear
        let axis_cos: Vec<Vec<Vec<f64>>> = (0..self.dimension)
            .map(|axis| {
                let g: &AngularGrid = &grid.axes()[axis];
                let maxe = self.max_exponent_on_axis(axis);
                (0..=maxe)
                    .map(|e| g.nodes().map(|t| (e as f64 * t).cos()).collect())
                    .collect()
            })
            .collect();
        for (k, exps) in self.exponents.iter().enumerate() {
            let row = &mut out[k * total..(k + 1) * total];
            for (flat, value) in row.iter_mut().enumerate() {
                let idx = grid.unflatten(flat);
                *value = (0..self.dimension)
                    .map(|i| axis_cos[i][exps[i] as usize][idx[i]])
                    .product();
            }
        }
        out
    }
}
