//! Stationary Gaussian process models with rational spectral densities.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::density::GridDensity;
use crate::error::{Error, Result};
use crate::grid::AngularGrid;
use crate::sampling::series::{SampleSeries, SeriesMeta};

/// Driving-noise convention: y_t = Σ a_j·y_{t−j} + e_t + Σ b_j·e_{t−j} with
/// e_t ~ N(0, σ²) i.i.d. The implied spectral density under the 1/2π lag
/// convention is σ²·|B(e^{iθ})|²/|A(e^{iθ})|² with A(z) = 1 − Σ a_j z^j and
/// B(z) = 1 + Σ b_j z^j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessModel {
    WhiteGaussian {
        variance: f64,
    },
    Ar {
        coeffs: Vec<f64>,
        innovation_variance: f64,
    },
    Ma {
        coeffs: Vec<f64>,
        innovation_variance: f64,
    },
    Arma {
        ar: Vec<f64>,
        ma: Vec<f64>,
        innovation_variance: f64,
    },
}

/// Schur-Cohn test: all roots of the monic polynomial
/// z^p − c_1·z^{p−1} − ... − c_p strictly inside the unit circle, i.e. the AR
/// recursion with coefficients c is stationary.
fn ar_stationary(coeffs: &[f64]) -> bool {
    // work on phi(z) = z^p - c1 z^{p-1} - ... - cp, stored as [1, -c1, .., -cp]
    let mut a: Vec<f64> = std::iter::once(1.0)
        .chain(coeffs.iter().map(|c| -c))
        .collect();
    while a.len() > 1 {
        let p = a.len() - 1;
        let k = a[p]; // last coefficient = product of roots (up to sign)
        if k.abs() >= 1.0 || !k.is_finite() {
            return false;
        }
        // step-down: a'(i) = (a(i) − k·a(p−i)) / (1 − k²) for i = 0..p−1
        let denom = 1.0 - k * k;
        let next: Vec<f64> = (0..p).map(|i| (a[i] - k * a[p - i]) / denom).collect();
        a = next;
    }
    true
}

impl ProcessModel {
    pub fn innovation_variance(&self) -> f64 {
        match self {
            ProcessModel::WhiteGaussian { variance } => *variance,
            ProcessModel::Ar {
                innovation_variance,
                ..
            }
            | ProcessModel::Ma {
                innovation_variance,
                ..
            }
            | ProcessModel::Arma {
                innovation_variance,
                ..
            } => *innovation_variance,
        }
    }

    pub fn ar_coeffs(&self) -> &[f64] {
        match self {
            ProcessModel::Ar { coeffs, .. } => coeffs,
            ProcessModel::Arma { ar, .. } => ar,
            _ => &[],
        }
    }

    pub fn ma_coeffs(&self) -> &[f64] {
        match self {
            ProcessModel::Ma { coeffs, .. } => coeffs,
            ProcessModel::Arma { ma, .. } => ma,
            _ => &[],
        }
    }

    pub fn order(&self) -> usize {
        self.ar_coeffs().len().max(self.ma_coeffs().len())
    }

    pub fn validate(&self) -> Result<()> {
        let sigma2 = self.innovation_variance();
        if sigma2 <= 0.0 || !sigma2.is_finite() {
            return Err(Error::Invalid(format!(
                "innovation variance must be positive, got {sigma2}"
            )));
        }
        if self
            .ar_coeffs()
            .iter()
            .chain(self.ma_coeffs())
            .any(|c| !c.is_finite())
        {
            return Err(Error::Invalid("non-finite model coefficient".into()));
        }
        if !self.ar_coeffs().is_empty() && !ar_stationary(self.ar_coeffs()) {
            return Err(Error::NonStationaryModel(format!(
                "AR coefficients {:?} have a root on or inside the unit circle",
                self.ar_coeffs()
            )));
        }
        Ok(())
    }

    /// σ²·|B|²/|A|² on the grid. Fails if the density is not strictly
    /// positive (an MA root on the unit circle).
    pub fn spectral_density(&self, grid: AngularGrid) -> Result<GridDensity> {
        self.validate()?;
        let sigma2 = self.innovation_variance();
        let ar = self.ar_coeffs();
        let ma = self.ma_coeffs();
        let values: Vec<f64> = grid
            .nodes()
            .map(|theta| {
                let (mut a_re, mut a_im) = (1.0, 0.0);
                for (j, c) in ar.iter().enumerate() {
                    let w = (j + 1) as f64 * theta;
                    a_re -= c * w.cos();
                    a_im -= c * w.sin();
                }
                let (mut b_re, mut b_im) = (1.0, 0.0);
                for (j, c) in ma.iter().enumerate() {
                    let w = (j + 1) as f64 * theta;
                    b_re += c * w.cos();
                    b_im += c * w.sin();
                }
                sigma2 * (b_re * b_re + b_im * b_im) / (a_re * a_re + a_im * a_im)
            })
            .collect();
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::NonPositiveDensity { node, value });
        }
        GridDensity::new(grid, values)
    }

    /// True covariance window by quadrature of the spectral density.
    pub fn true_lags(&self, order: usize, grid: AngularGrid) -> Result<Vec<f64>> {
        self.spectral_density(grid)?.raw_lags(order)
    }

    /// Compact id recorded in series metadata.
    pub fn id(&self) -> String {
        match self {
            ProcessModel::WhiteGaussian { variance } => format!("white(var={variance})"),
            ProcessModel::Ar {
                coeffs,
                innovation_variance,
            } => format!("ar(coeffs={coeffs:?},var={innovation_variance})"),
            ProcessModel::Ma {
                coeffs,
                innovation_variance,
            } => format!("ma(coeffs={coeffs:?},var={innovation_variance})"),
            ProcessModel::Arma {
                ar,
                ma,
                innovation_variance,
            } => format!("arma(ar={ar:?},ma={ma:?},var={innovation_variance})"),
        }
    }
}

/// Draws `length` samples of the stationary process after a burn-in of
/// max(1000, 50·order) steps. Deterministic per seed.
pub fn simulate(model: &ProcessModel, length: usize, seed: u64) -> Result<SampleSeries> {
    model.validate()?;
    if length < 2 {
        return Err(Error::Invalid("need at least 2 samples".into()));
    }
    let burn_in = 1000usize.max(50 * model.order());
    let total = burn_in + length;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, model.innovation_variance().sqrt())
        .map_err(|e| Error::Invalid(e.to_string()))?;

    let ar = model.ar_coeffs();
    let ma = model.ma_coeffs();
    let mut innovations = vec![0.0; total];
    for e in innovations.iter_mut() {
        *e = normal.sample(&mut rng);
    }
    let mut y = vec![0.0; total];
    for t in 0..total {
        let mut v = innovations[t];
        for (j, c) in ma.iter().enumerate() {
            if t > j {
                v += c * innovations[t - j - 1];
            }
        }
        for (j, c) in ar.iter().enumerate() {
            if t > j {
                v += c * y[t - j - 1];
            }
        }
        y[t] = v;
    }
    y.drain(..burn_in);
    SampleSeries::new(
        y,
        SeriesMeta {
            model: model.id(),
            seed,
        },
    )
}
