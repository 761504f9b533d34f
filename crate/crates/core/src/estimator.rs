//! Rational spectral density estimation from covariance lags.
//!
//! Given a lag window r and a positive numerator polynomial P, the estimate
//! Φ = P/Q matches the window exactly, with Q the unique minimizer of the
//! strictly convex dual
//!
//! ```text
//! J_P(Q) = ⟨r, q⟩ − (1/2π)·∫ P log Q dθ,   ⟨r, q⟩ = r₀q₀ + 2·Σ_{k≥1} r_k q_k
//! ```
//!
//! over the open cone of positive Q. The gradient is the moment mismatch
//! r_k − (1/2π)∫cos(kθ)·P/Q dθ (entries k ≥ 1 carry the pairing factor 2),
//! so stationarity is exact moment matching.

use std::f64::consts::PI;

use crate::covariance::CovarianceSequence;
use crate::density::GridDensity;
use crate::error::{Error, Result};
use crate::grid::{cosine_table, AngularGrid};
use crate::newton::{self, DualObjective, Eval};
use crate::options::SolverOptions;
use crate::poly::TrigPolynomial;

/// Maximum relative moment residual accepted from a converged solve.
pub const MOMENT_RESIDUAL_TOL: f64 = 1e-8;

/// A lag window, a prior numerator P ∈ 𝔓₊, and the evaluation grid.
#[derive(Debug, Clone)]
pub struct EstimatorProblem {
    lags: CovarianceSequence,
    prior: TrigPolynomial,
    grid: AngularGrid,
}

impl EstimatorProblem {
    pub fn new(lags: CovarianceSequence, prior: TrigPolynomial, grid: AngularGrid) -> Result<Self> {
        if 2 * lags.order() >= grid.size() {
            return Err(Error::Aliasing {
                order: lags.order(),
                grid: grid.size(),
            });
        }
        let min = prior.min_on(&grid);
        if min <= 0.0 {
            return Err(Error::Invalid(format!(
                "prior must be strictly positive on the grid (min {min})"
            )));
        }
        Ok(Self { lags, prior, grid })
    }

    pub fn lags(&self) -> &CovarianceSequence {
        &self.lags
    }

    pub fn prior(&self) -> &TrigPolynomial {
        &self.prior
    }

    pub fn grid(&self) -> AngularGrid {
        self.grid
    }
}

/// Rational density Φ = P/Q with Q in the positive cone.
#[derive(Debug, Clone)]
pub struct RationalDensity {
    numerator: TrigPolynomial,
    denominator: TrigPolynomial,
    iterations: usize,
    gradient_norm: f64,
    moment_residual: f64,
}

impl RationalDensity {
    pub fn numerator(&self) -> &TrigPolynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &TrigPolynomial {
        &self.denominator
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn gradient_norm(&self) -> f64 {
        self.gradient_norm
    }

    /// Largest |r_k(P/Q) − r_k| over the solved window.
    pub fn moment_residual(&self) -> f64 {
        self.moment_residual
    }

    /// P/Q evaluated on a grid.
    pub fn density(&self, grid: AngularGrid) -> Result<GridDensity> {
        let p = self.numerator.evaluate_on(&grid);
        let q = self.denominator.evaluate_on(&grid);
        if let Some((node, &value)) = q.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::NonPositiveQ { node, value });
        }
        GridDensity::new(grid, p.iter().zip(&q).map(|(pv, qv)| pv / qv).collect())
    }
}

/// Pairing weights (1, 2, 2, ...) of the real cosine convention.
fn pairing_weights(n: usize) -> Vec<f64> {
    let mut w = vec![2.0; n + 1];
    w[0] = 1.0;
    w
}

struct DualProblem<'a> {
    problem: &'a EstimatorProblem,
    prior_values: Vec<f64>,
    cos: Vec<f64>,
    weights: Vec<f64>,
}

impl<'a> DualProblem<'a> {
    fn new(problem: &'a EstimatorProblem) -> Self {
        let n = problem.lags.order();
        Self {
            prior_values: problem.prior.evaluate_on(&problem.grid),
            cos: cosine_table(&problem.grid, n),
            weights: pairing_weights(n),
            problem,
        }
    }

    /// Q values at the nodes for coefficient vector q; None if Q ≤ 0 anywhere.
    fn q_values(&self, q: &[f64]) -> Option<Vec<f64>> {
        let m = self.problem.grid.size();
        let mut qv = vec![q[0]; m];
        for (k, &c) in q.iter().enumerate().skip(1) {
            let row = &self.cos[k * m..(k + 1) * m];
            for (v, t) in qv.iter_mut().zip(row) {
                *v += 2.0 * c * t;
            }
        }
        if qv.iter().all(|&v| v > 0.0) {
            Some(qv)
        } else {
            None
        }
    }
}

impl DualObjective for DualProblem<'_> {
    fn scale(&self) -> f64 {
        self.problem.lags.r0()
    }

    fn eval(&self, q: &[f64]) -> Option<Eval> {
        let grid = &self.problem.grid;
        let m = grid.size();
        let n = self.problem.lags.order();
        let r = self.problem.lags.lags();
        let qv = self.q_values(q)?;
        let quad = grid.weight() / (2.0 * PI);

        // value = <r, q> − (1/2π)∫P log Q
        let pairing: f64 = (0..=n).map(|k| self.weights[k] * r[k] * q[k]).sum();
        let log_term: f64 = self
            .prior_values
            .iter()
            .zip(&qv)
            .map(|(p, v)| p * v.ln())
            .sum::<f64>()
            * quad;
        let value = pairing - log_term;
        if !value.is_finite() {
            return None;
        }

        // ratio P/Q drives both gradient and Hessian
        let ratio: Vec<f64> = self
            .prior_values
            .iter()
            .zip(&qv)
            .map(|(p, v)| p / v)
            .collect();
        let grad: Vec<f64> = (0..=n)
            .map(|k| {
                let row = &self.cos[k * m..(k + 1) * m];
                let moment = row.iter().zip(&ratio).map(|(c, v)| c * v).sum::<f64>() * quad;
                self.weights[k] * (r[k] - moment)
            })
            .collect();

        let curvature: Vec<f64> = ratio.iter().zip(&qv).map(|(pq, v)| pq / v).collect();
        let mut hess = vec![0.0; (n + 1) * (n + 1)];
        for j in 0..=n {
            let rj = &self.cos[j * m..(j + 1) * m];
            for k in j..=n {
                let rk = &self.cos[k * m..(k + 1) * m];
                let mut s = 0.0;
                for i in 0..m {
                    s += rj[i] * rk[i] * curvature[i];
                }
                let v = self.weights[j] * self.weights[k] * s * quad;
                hess[j * (n + 1) + k] = v;
                hess[k * (n + 1) + j] = v;
            }
        }

        Some(Eval { value, grad, hess })
    }

    fn boundary_error(&self) -> Error {
        Error::BoundaryApproach
    }
}

/// Minimizes the dual functional and returns the moment-matched estimate.
///
/// Converged solves satisfy max_k |r_k(P/Q) − r_k| ≤ 1e−8·r₀. The default
/// start is the flat feasible point q = (mean(P)/r₀, 0, ..., 0).
pub fn solve_dual(problem: &EstimatorProblem, opts: &SolverOptions) -> Result<RationalDensity> {
    let dual = DualProblem::new(problem);
    let n = problem.lags.order();
    let mean_prior = problem
        .grid
        .integrate(&dual.prior_values)
        / (2.0 * PI);
    let mut q0 = vec![0.0; n + 1];
    q0[0] = mean_prior / problem.lags.r0();
    solve_dual_from(problem, opts, &TrigPolynomial::new(q0)?)
}

/// Same solve from an explicit interior starting point (warm starts; also
/// how the uniqueness of the minimizer is exercised in tests).
pub fn solve_dual_from(
    problem: &EstimatorProblem,
    opts: &SolverOptions,
    start: &TrigPolynomial,
) -> Result<RationalDensity> {
    let dual = DualProblem::new(problem);
    let n = problem.lags.order();
    if start.degree() != n {
        return Err(Error::Invalid(format!(
            "start has degree {}, lag window has order {n}",
            start.degree()
        )));
    }
    let out = newton::minimize(&dual, start.coeffs().to_vec(), opts)?;
    let denominator = TrigPolynomial::new(out.x)?;

    let result = RationalDensity {
        numerator: problem.prior.clone(),
        denominator,
        iterations: out.iterations,
        gradient_norm: out.grad_inf_norm,
        moment_residual: 0.0,
    };
    let achieved = result.density(problem.grid)?.raw_lags(n)?;
    let residual = achieved
        .iter()
        .zip(problem.lags.lags())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if residual > MOMENT_RESIDUAL_TOL * problem.lags.r0() {
        return Err(Error::MaxIterations(out.iterations));
    }
    Ok(RationalDensity {
        moment_residual: residual,
        ..result
    })
}

/// Dual value and gradient at q, for diagnostics and derivative checks.
pub fn dual_value_and_gradient(
    q: &TrigPolynomial,
    problem: &EstimatorProblem,
) -> Result<(f64, Vec<f64>)> {
    if q.degree() != problem.lags.order() {
        return Err(Error::Invalid(format!(
            "q has degree {}, lag window has order {}",
            q.degree(),
            problem.lags.order()
        )));
    }
    let dual = DualProblem::new(problem);
    if let Some((node, &value)) = q
        .evaluate_on(&problem.grid)
        .iter()
        .enumerate()
        .find(|(_, v)| **v <= 0.0)
    {
        return Err(Error::NonPositiveQ { node, value });
    }
    let eval = dual
        .eval(q.coeffs())
        .ok_or_else(|| Error::Invalid("dual value overflowed".into()))?;
    Ok((eval.value, eval.grad))
}
