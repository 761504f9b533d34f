//! Real symmetric trigonometric polynomials c₀ + 2·Σ_{k≥1} c_k cos(kθ).
//!
//! This is the real-coefficient cosine form used for every polynomial in the
//! library (numerators P, denominators Q, maximum-entropy exponents). Spectral
//! densities of real processes are real and even, so nothing is lost against
//! the complex-exponential form.

use crate::error::{Error, Result};
use crate::grid::{cosine_table, AngularGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    coeffs: Vec<f64>,
}

impl TrigPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("polynomial needs at least c0".into()));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Invalid(format!("non-finite coefficient {c}")));
        }
        Ok(Self { coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// c₀ + 2·Σ c_k cos(kθ) at a single angle.
    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.coeffs[0];
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            v += 2.0 * c * (k as f64 * theta).cos();
        }
        v
    }

    /// Value table on the grid nodes. Not clamped: negative values are
    /// returned as-is for polynomials outside the positive cone.
    pub fn evaluate_on(&self, grid: &AngularGrid) -> Vec<f64> {
        let m = grid.size();
        let n = self.degree();
        let table = cosine_table(grid, n);
        let mut out = vec![self.coeffs[0]; m];
        for k in 1..=n {
            let row = &table[k * m..(k + 1) * m];
            let c = 2.0 * self.coeffs[k];
            for (o, t) in out.iter_mut().zip(row) {
                *o += c * t;
            }
        }
        out
    }

    pub fn min_on(&self, grid: &AngularGrid) -> f64 {
        self.evaluate_on(grid)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Membership test for the open cone 𝔓₊ of positive polynomials,
    /// checked on a dense grid.
    pub fn is_positive_on(&self, grid: &AngularGrid) -> bool {
        self.min_on(grid) > 0.0
    }
}
