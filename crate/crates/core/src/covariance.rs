//! Covariance lag windows and the Toeplitz positive-definiteness test.

use crate::error::{Error, Result};
use crate::linalg;

/// Relative Cholesky pivot threshold for the PD test (scaled by r₀).
pub const PD_PIVOT_TOL: f64 = 1e-12;

/// True iff the symmetric Toeplitz matrix built from `lags` admits a Cholesky
/// factorization with every pivot above `PD_PIVOT_TOL`·r₀.
pub fn toeplitz_positive_definite(lags: &[f64]) -> bool {
    if lags.is_empty() || !lags[0].is_finite() || lags[0] <= 0.0 {
        return false;
    }
    if lags.iter().any(|l| !l.is_finite()) {
        return false;
    }
    let t = linalg::toeplitz(lags);
    linalg::cholesky(&t, lags.len(), PD_PIVOT_TOL * lags[0]).is_ok()
}

/// A finite window r₀..r_n of covariance lags with a positive-definite
/// Toeplitz matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSequence {
    lags: Vec<f64>,
}

impl CovarianceSequence {
    pub fn new(lags: Vec<f64>) -> Result<Self> {
        if lags.is_empty() {
            return Err(Error::Invalid("need at least r0".into()));
        }
        if let Some(l) = lags.iter().find(|l| !l.is_finite()) {
            return Err(Error::Invalid(format!("non-finite lag {l}")));
        }
        let r0 = lags[0];
        if r0 <= 0.0 {
            return Err(Error::Invalid(format!("r0 must be positive, got {r0}")));
        }
        if let Some((k, _)) = lags
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, r)| r.abs() >= r0)
        {
            return Err(Error::Invalid(format!("|r_{k}| must be below r0")));
        }
        let t = linalg::toeplitz(&lags);
        if let Err(pivot) = linalg::cholesky(&t, lags.len(), PD_PIVOT_TOL * r0) {
            return Err(Error::ToeplitzNotPd(pivot));
        }
        Ok(Self { lags })
    }

    pub fn order(&self) -> usize {
        self.lags.len() - 1
    }

    pub fn lags(&self) -> &[f64] {
        &self.lags
    }

    pub fn r0(&self) -> f64 {
        self.lags[0]
    }
}
