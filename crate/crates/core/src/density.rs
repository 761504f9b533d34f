//! Spectral densities sampled on a uniform angular grid, and the integral
//! operations built on them: covariance lags, entropy, Kullback-Leibler
//! divergence, total variation, and cepstral coefficients.
//!
//! Conventions fixed once for the whole library:
//! - lags carry the 1/2π normalization, r_k = (1/2π)·∫cos(kθ)·Φ(θ) dθ;
//! - entropy is unnormalized, H[Φ] = −∫Φ log Φ dθ, with 0·log 0 = 0;
//! - total variation is the Kolmogorov-style sup over grid prefixes of the
//!   cumulative quadrature difference, not the half-L¹ distance;
//! - spectral densities are not probability densities: KL between densities
//!   of unequal mass can be negative.

use std::f64::consts::PI;

use crate::covariance::CovarianceSequence;
use crate::error::{Error, Result};
use crate::grid::{cosine_table, AngularGrid};
use crate::poly::TrigPolynomial;

/// Nonnegative values of a spectral density at the nodes of an [`AngularGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    grid: AngularGrid,
    values: Vec<f64>,
}

/// x·log x with the measure-theoretic convention 0·log 0 = 0.
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

impl GridDensity {
    pub fn new(grid: AngularGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.size() {
            return Err(Error::GridMismatch(values.len(), grid.size()));
        }
        if let Some((node, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::NonPositiveDensity { node, value });
        }
        Ok(Self { grid, values })
    }

    /// Evaluates a polynomial and wraps the table as a density; fails if the
    /// polynomial is negative anywhere on the grid.
    pub fn from_polynomial(poly: &TrigPolynomial, grid: AngularGrid) -> Result<Self> {
        Self::new(grid, poly.evaluate_on(&grid))
    }

    pub fn grid(&self) -> AngularGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mass ∫Φ dθ.
    pub fn mass(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    fn check_same_grid(&self, other: &GridDensity) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(self.grid.size(), other.grid.size()));
        }
        Ok(())
    }

    /// Single cosine moment (1/2π)·∫cos(kθ)·Φ dθ.
    pub fn cosine_moment(&self, k: usize) -> f64 {
        let mut s = 0.0;
        for (theta, v) in self.grid.nodes().zip(&self.values) {
            s += (k as f64 * theta).cos() * v;
        }
        s * self.grid.weight() / (2.0 * PI)
    }

    /// Raw lag window r_0..r_order under the 1/2π convention, without the
    /// positive-definiteness wrapper.
    pub fn raw_lags(&self, order: usize) -> Result<Vec<f64>> {
        if 2 * order >= self.grid.size() {
            return Err(Error::Aliasing {
                order,
                grid: self.grid.size(),
            });
        }
        let m = self.grid.size();
        let table = cosine_table(&self.grid, order);
        let scale = self.grid.weight() / (2.0 * PI);
        Ok((0..=order)
            .map(|k| {
                let row = &table[k * m..(k + 1) * m];
                row.iter()
                    .zip(&self.values)
                    .map(|(c, v)| c * v)
                    .sum::<f64>()
                    * scale
            })
            .collect())
    }

    /// Covariance window of the density, validated positive definite.
    pub fn compute_lags(&self, order: usize) -> Result<CovarianceSequence> {
        CovarianceSequence::new(self.raw_lags(order)?)
    }

    /// Shannon entropy H[Φ] = −∫Φ log Φ dθ.
    pub fn entropy(&self) -> f64 {
        -self.grid.weight() * self.values.iter().map(|&v| xlogx(v)).sum::<f64>()
    }

    /// KL divergence ∫p·log(p/q) dθ. Nodes with p = 0 contribute zero; a node
    /// with p > 0 and q = 0 makes the divergence +∞.
    pub fn kl_divergence(&self, q: &GridDensity) -> Result<f64> {
        self.check_same_grid(q)?;
        let mut s = 0.0;
        for (&pv, &qv) in self.values.iter().zip(&q.values) {
            if pv == 0.0 {
                continue;
            }
            if qv <= 0.0 {
                return Ok(f64::INFINITY);
            }
            s += pv * (pv / qv).ln();
        }
        Ok(s * self.grid.weight())
    }

    /// Total variation in the Kolmogorov sense:
    /// sup over grid prefixes θ of |∫_{−π}^{θ} (p − q) dθ|.
    ///
    /// Prefix integrals use the trapezoidal rule with the periodic wrap node
    /// at π, so the final prefix is the exact full-period quadrature of the
    /// mass difference.
    pub fn tv_distance(&self, q: &GridDensity) -> Result<f64> {
        self.check_same_grid(q)?;
        let h = self.grid.weight();
        let size = self.grid.size();
        let diff = |j: usize| self.values[j % size] - q.values[j % size];
        let mut cum = 0.0;
        let mut sup = 0.0f64;
        for j in 1..=size {
            cum += 0.5 * h * (diff(j - 1) + diff(j));
            sup = sup.max(cum.abs());
        }
        Ok(sup)
    }

    /// Cepstral coefficients c_k = (1/2π)·∫cos(kθ)·log Φ dθ for k = 0..order.
    /// Requires Φ strictly positive on the grid.
    pub fn cepstral_coeffs(&self, order: usize) -> Result<Vec<f64>> {
        if let Some((node, &value)) = self.values.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::NonPositiveDensity { node, value });
        }
        if 2 * order >= self.grid.size() {
            return Err(Error::Aliasing {
                order,
                grid: self.grid.size(),
            });
        }
        let logs: Vec<f64> = self.values.iter().map(|v| v.ln()).collect();
        let m = self.grid.size();
        let table = cosine_table(&self.grid, order);
        let scale = self.grid.weight() / (2.0 * PI);
        Ok((0..=order)
            .map(|k| {
                let row = &table[k * m..(k + 1) * m];
                row.iter().zip(&logs).map(|(c, v)| c * v).sum::<f64>() * scale
            })
            .collect())
    }
}
