//! Interval-probability assessments for sample lags: the marginal chain
//! (known pair distribution), moment-only tail bounds (Markov / Cantelli),
//! and an empirical Monte Carlo estimate.
//!
//! All analytic assessments instantiate the same chain on the lag estimator
//! r̃_k = (1/(N+1−k))·Σ y_t·y_{t+k}:
//!
//! ```text
//! P{a ≤ r̃_k ≤ b}  ⟶  1 − P{X ≤ a}^{N+1−k} − P{X ≥ b}^{N+1−k},  X = y_t·y_{t+k}
//! ```
//!
//! and the per-lag values are combined by the independence product, which is
//! a modeling assumption (overlapping sample lags are correlated), so every
//! consumer labels it as an assessment rather than a certified probability.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::maxent::LagBox;
use crate::sampling::model::{simulate, ProcessModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssessmentMethod {
    Marginal,
    MomentMarkov,
    MomentCantelli,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagInterval {
    pub lower: f64,
    pub upper: f64,
    pub probability: f64,
    pub method: AssessmentMethod,
    /// 95% Wilson interval when the probability is an empirical frequency.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wilson95: Option<(f64, f64)>,
}

/// Per-lag interval probabilities and their product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityAssessment {
    per_lag: Vec<LagInterval>,
    product: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    joint_frequency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    joint_wilson95: Option<(f64, f64)>,
}

impl ProbabilityAssessment {
    pub fn from_per_lag(per_lag: Vec<LagInterval>) -> Self {
        let product = per_lag.iter().map(|l| l.probability).product();
        Self {
            per_lag,
            product,
            joint_frequency: None,
            joint_wilson95: None,
        }
    }

    pub fn per_lag(&self) -> &[LagInterval] {
        &self.per_lag
    }

    pub fn product(&self) -> f64 {
        self.product
    }

    /// Empirical joint frequency, when the assessment came from Monte Carlo.
    pub fn joint_frequency(&self) -> Option<f64> {
        self.joint_frequency
    }

    pub fn joint_wilson95(&self) -> Option<(f64, f64)> {
        self.joint_wilson95
    }
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    assert!(trials > 0);
    let z = 1.959963984540054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Law of the product X = y_t·y_{t+k} needed by the marginal chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairDistribution {
    /// Product of jointly Gaussian zero-mean variables with common variance
    /// r₀ and covariance r_k.
    GaussianProduct { variance: f64, covariance: f64 },
    /// Placeholder for laws the library cannot integrate analytically.
    Unknown { description: String },
}

impl PairDistribution {
    /// Pair law of (y_t, y_{t+k}) for a Gaussian process model, from its true
    /// lags on a quadrature grid.
    pub fn from_model(
        model: &ProcessModel,
        k: usize,
        grid: crate::grid::AngularGrid,
    ) -> Result<Self> {
        let lags = model.true_lags(k, grid)?;
        Ok(PairDistribution::GaussianProduct {
            variance: lags[0],
            covariance: lags[k],
        })
    }

    /// P{X ≤ x} for the product law.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        match self {
            PairDistribution::GaussianProduct {
                variance,
                covariance,
            } => {
                if *variance <= 0.0 || !variance.is_finite() {
                    return Err(Error::InvalidMoments(format!(
                        "pair variance must be positive, got {variance}"
                    )));
                }
                Ok(gaussian_product_cdf(*variance, *covariance, x))
            }
            PairDistribution::Unknown { description } => {
                Err(Error::UnknownDistribution(description.clone()))
            }
        }
    }
}

/// CDF of X·Y for (X, Y) zero-mean jointly Gaussian with Var = v each and
/// Cov = c, by integrating the conditional normal over the density of X.
fn gaussian_product_cdf(v: f64, c: f64, z: f64) -> f64 {
    if z == f64::INFINITY {
        return 1.0;
    }
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    let rho = (c / v).clamp(-1.0, 1.0);
    let chi = ChiSquared::new(1.0).expect("valid dof");
    if rho >= 1.0 - 1e-12 {
        // X·Y = X², with X²/v ~ χ²₁
        return if z <= 0.0 { 0.0 } else { chi.cdf(z / v) };
    }
    if rho <= -1.0 + 1e-12 {
        // X·Y = −X²
        return if z >= 0.0 { 1.0 } else { 1.0 - chi.cdf(-z / v) };
    }

    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let sd = v.sqrt();
    let cond_sd = (v * (1.0 - rho * rho)).sqrt();
    // P{xY ≤ z | X = x}, with Y|x ~ N(ρx, v(1−ρ²))
    let conditional = |x: f64| -> f64 {
        if x == 0.0 {
            return if z >= 0.0 { 1.0 } else { 0.0 };
        }
        let t = (z / x - rho * x) / cond_sd;
        if x > 0.0 {
            normal.cdf(t)
        } else {
            1.0 - normal.cdf(t)
        }
    };
    // composite Simpson on [−8σ, 0] and [0, 8σ] (integrand kinks at 0)
    let half = |lo: f64, hi: f64| -> f64 {
        let steps = 2000usize; // even
        let h = (hi - lo) / steps as f64;
        let mut s = 0.0;
        for i in 0..=steps {
            let x = lo + i as f64 * h;
            let w = if i == 0 || i == steps {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let phi = (-0.5 * (x / sd) * (x / sd)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
            s += w * phi * conditional(x);
        }
        s * h / 3.0
    };
    let lim = 8.0 * sd;
    (half(-lim, 0.0) + half(0.0, lim)).clamp(0.0, 1.0)
}

fn chain(tail_low: f64, tail_high: f64, n_samples: usize, k: usize) -> Result<f64> {
    if k >= n_samples {
        return Err(Error::OrderTooLarge {
            order: k,
            len: n_samples,
        });
    }
    let exponent = (n_samples - k) as i32; // N+1−k for a series y_0..y_N of N+1 samples
    let p = 1.0 - tail_low.powi(exponent) - tail_high.powi(exponent);
    Ok(p.clamp(0.0, 1.0))
}

/// Marginal-knowledge assessment of P{a ≤ r̃_k ≤ b} from the known law of
/// the product y_t·y_{t+k}; `n_samples` is the series length N+1.
pub fn marginal_interval_probability(
    pair: &PairDistribution,
    a: f64,
    b: f64,
    n_samples: usize,
    k: usize,
) -> Result<f64> {
    if a > b {
        return Err(Error::Invalid(format!("interval [{a}, {b}] is empty")));
    }
    let tail_low = pair.cdf(a)?;
    let tail_high = 1.0 - pair.cdf(b)?;
    chain(tail_low, tail_high, n_samples, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    Markov,
    Cantelli,
}

impl MomentMethod {
    pub fn assessment_method(self) -> AssessmentMethod {
        match self {
            MomentMethod::Markov => AssessmentMethod::MomentMarkov,
            MomentMethod::Cantelli => AssessmentMethod::MomentCantelli,
        }
    }
}

/// Moment-knowledge assessment from the first two power moments (m₁, m₂) of
/// the product y_t·y_{t+k}. Tail probabilities are replaced by classical
/// bounds, which is conservative: larger tail estimates give a smaller
/// interval probability.
pub fn moment_interval_probability(
    moments: &[f64],
    a: f64,
    b: f64,
    n_samples: usize,
    k: usize,
    method: MomentMethod,
) -> Result<f64> {
    if moments.len() < 2 {
        return Err(Error::InvalidMoments(
            "need the first two power moments".into(),
        ));
    }
    let (m1, m2) = (moments[0], moments[1]);
    if !m1.is_finite() || !m2.is_finite() || m2 < m1 * m1 {
        return Err(Error::InvalidMoments(format!(
            "require finite m1, m2 with m2 ≥ m1²: got ({m1}, {m2})"
        )));
    }
    if a > b {
        return Err(Error::Invalid(format!("interval [{a}, {b}] is empty")));
    }
    let var = m2 - m1 * m1;
    let (tail_low, tail_high) = match method {
        MomentMethod::Cantelli => {
            let low = if a < m1 {
                var / (var + (m1 - a) * (m1 - a))
            } else {
                1.0
            };
            let high = if b > m1 {
                var / (var + (b - m1) * (b - m1))
            } else {
                1.0
            };
            (low, high)
        }
        MomentMethod::Markov => {
            // second-moment Markov on |X|: P{X ≥ b} ≤ m₂/b² for b > 0
            let low = if a < 0.0 { (m2 / (a * a)).min(1.0) } else { 1.0 };
            let high = if b > 0.0 { (m2 / (b * b)).min(1.0) } else { 1.0 };
            (low, high)
        }
    };
    chain(tail_low, tail_high, n_samples, k)
}

/// Empirical interval probabilities: frequency over `trials` independent
/// simulations of the event {a_k ≤ r̃_k ≤ b_k} per lag and jointly, with 95%
/// Wilson intervals. Trials are merged in index order, so the result is
/// deterministic per seed.
pub fn monte_carlo_interval_probability(
    model: &ProcessModel,
    box_: &LagBox,
    order: usize,
    n_samples: usize,
    trials: usize,
    seed: u64,
) -> Result<ProbabilityAssessment> {
    assert!(trials >= 100, "need at least 100 trials, got {trials}");
    if box_.order() != order {
        return Err(Error::Invalid(format!(
            "box order {} does not match requested order {order}",
            box_.order()
        )));
    }
    model.validate()?;

    let hits: Vec<(Vec<bool>, bool)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = derive_seed(seed, trial as u64);
            let series = simulate(model, n_samples, trial_seed).expect("validated model");
            let lags = series.estimate_lags(order).expect("order < length");
            let per: Vec<bool> = lags
                .iter()
                .zip(box_.lower().iter().zip(box_.upper()))
                .map(|(r, (a, b))| a <= r && r <= b)
                .collect();
            let joint = per.iter().all(|&x| x);
            (per, joint)
        })
        .collect();

    let mut per_counts = vec![0usize; order + 1];
    let mut joint_count = 0usize;
    for (per, joint) in &hits {
        for (c, &hit) in per_counts.iter_mut().zip(per) {
            *c += hit as usize;
        }
        joint_count += *joint as usize;
    }

    let per_lag = (0..=order)
        .map(|k| LagInterval {
            lower: box_.lower()[k],
            upper: box_.upper()[k],
            probability: per_counts[k] as f64 / trials as f64,
            method: AssessmentMethod::MonteCarlo,
            wilson95: Some(wilson_interval(per_counts[k], trials)),
        })
        .collect();
    let mut assessment = ProbabilityAssessment::from_per_lag(per_lag);
    assessment.joint_frequency = Some(joint_count as f64 / trials as f64);
    assessment.joint_wilson95 = Some(wilson_interval(joint_count, trials));
    Ok(assessment)
}

/// Stable per-trial seed derivation (splitmix64 step over the base seed).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Marginal-chain assessment of a whole box for a Gaussian model, one
/// interval per lag, combined by the independence product.
pub fn assess_box_marginal(
    model: &ProcessModel,
    box_: &LagBox,
    n_samples: usize,
    grid: crate::grid::AngularGrid,
) -> Result<ProbabilityAssessment> {
    let order = box_.order();
    let per_lag = (0..=order)
        .map(|k| {
            let pair = PairDistribution::from_model(model, k, grid)?;
            let p = marginal_interval_probability(
                &pair,
                box_.lower()[k],
                box_.upper()[k],
                n_samples,
                k,
            )?;
            Ok(LagInterval {
                lower: box_.lower()[k],
                upper: box_.upper()[k],
                probability: p,
                method: AssessmentMethod::Marginal,
                wilson95: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbabilityAssessment::from_per_lag(per_lag))
}
