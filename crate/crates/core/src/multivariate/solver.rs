//! Multivariate estimator and maximum-entropy duals over the cosine-product
//! basis. Same structure as the univariate solvers: strictly convex duals
//! whose gradients are the moment mismatches, minimized by damped Newton.
//!
//! With the plain basis pairing ⟨r, q⟩ = Σ r_k q_k:
//!
//! - estimator dual: J(q) = ⟨r, q⟩ − (1/(2π)^d)·∫ P log Q dθ, Q = Σ q_k β_k;
//! - maxent dual:    F(λ) = (1/(2π)^d)·∫ exp(−1 − Σ λ_k β_k) dθ + ⟨λ, r⟩,
//!   with entropy identity H[Φ̆] = (2π)^d·(r₀ + Σ λ_k r_k) at the solution.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::multivariate::basis::MultiBasis;
use crate::multivariate::density::{MultiGrid, MultiGridDensity};
use crate::newton::{self, DualObjective, Eval};
use crate::options::SolverOptions;

/// Relative moment residual accepted from converged multivariate solves.
pub const MULTI_MOMENT_RESIDUAL_TOL: f64 = 1e-7;

/// Polynomial Σ c_k·β_k over a multivariate basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPolynomial {
    basis: MultiBasis,
    coeffs: Vec<f64>,
}

impl MultiPolynomial {
    pub fn new(basis: MultiBasis, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::Invalid(format!(
                "{} coefficients for a basis of {} functions",
                coeffs.len(),
                basis.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("non-finite coefficient".into()));
        }
        Ok(Self { basis, coeffs })
    }

    pub fn constant(basis: MultiBasis, c: f64) -> Result<Self> {
        let mut coeffs = vec![0.0; basis.len()];
        coeffs[0] = c;
        Self::new(basis, coeffs)
    }

    pub fn basis(&self) -> &MultiBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn evaluate_on(&self, grid: &MultiGrid) -> Result<Vec<f64>> {
        self.basis.check_grid(grid)?;
        let total = grid.len();
        let tables = self.basis.tables(grid);
        let mut out = vec![0.0; total];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let row = &tables[k * total..(k + 1) * total];
            for (o, b) in out.iter_mut().zip(row) {
                *o += c * b;
            }
        }
        Ok(out)
    }
}

fn moments_of(values: &[f64], tables: &[f64], n1: usize, grid: &MultiGrid) -> Vec<f64> {
    let total = grid.len();
    let norm = grid.weight() / (2.0 * PI).powi(grid.dimension() as i32);
    (0..n1)
        .map(|k| {
            let row = &tables[k * total..(k + 1) * total];
            row.iter().zip(values).map(|(b, v)| b * v).sum::<f64>() * norm
        })
        .collect()
}

fn weighted_gram(
    tables: &[f64],
    n1: usize,
    grid: &MultiGrid,
    weights: &[f64],
) -> Vec<f64> {
    let total = grid.len();
    let norm = grid.weight() / (2.0 * PI).powi(grid.dimension() as i32);
    let mut hess = vec![0.0; n1 * n1];
    for j in 0..n1 {
        let rj = &tables[j * total..(j + 1) * total];
        for k in j..n1 {
            let rk = &tables[k * total..(k + 1) * total];
            let mut s = 0.0;
            for i in 0..total {
                s += rj[i] * rk[i] * weights[i];
            }
            let v = s * norm;
            hess[j * n1 + k] = v;
            hess[k * n1 + j] = v;
        }
    }
    hess
}

fn validate_problem(moments: &[f64], basis: &MultiBasis, grid: &MultiGrid) -> Result<()> {
    basis.check_grid(grid)?;
    if moments.len() != basis.len() {
        return Err(Error::Invalid(format!(
            "{} moments for a basis of {} functions",
            moments.len(),
            basis.len()
        )));
    }
    if moments.iter().any(|m| !m.is_finite()) {
        return Err(Error::Invalid("non-finite moment".into()));
    }
    if moments[0] <= 0.0 {
        return Err(Error::Invalid(format!(
            "moment of the constant function must be positive, got {}",
            moments[0]
        )));
    }
    Ok(())
}

struct MultiDual<'a> {
    moments: &'a [f64],
    prior_values: Vec<f64>,
    tables: Vec<f64>,
    grid: &'a MultiGrid,
}

impl DualObjective for MultiDual<'_> {
    fn scale(&self) -> f64 {
        self.moments[0]
    }

    fn eval(&self, q: &[f64]) -> Option<Eval> {
        let total = self.grid.len();
        let n1 = self.moments.len();
        let mut qv = vec![0.0; total];
        for (k, &c) in q.iter().enumerate() {
            let row = &self.tables[k * total..(k + 1) * total];
            for (o, b) in qv.iter_mut().zip(row) {
                *o += c * b;
            }
        }
        if qv.iter().any(|&v| v <= 0.0) {
            return None;
        }
        let norm = self.grid.weight() / (2.0 * PI).powi(self.grid.dimension() as i32);
        let pairing: f64 = self.moments.iter().zip(q).map(|(r, c)| r * c).sum();
        let log_term: f64 = self
            .prior_values
            .iter()
            .zip(&qv)
            .map(|(p, v)| p * v.ln())
            .sum::<f64>()
            * norm;
        let value = pairing - log_term;
        if !value.is_finite() {
            return None;
        }
        let ratio: Vec<f64> = self
            .prior_values
            .iter()
            .zip(&qv)
            .map(|(p, v)| p / v)
            .collect();
        let achieved = moments_of(&ratio, &self.tables, n1, self.grid);
        let grad: Vec<f64> = self
            .moments
            .iter()
            .zip(&achieved)
            .map(|(r, m)| r - m)
            .collect();
        let curvature: Vec<f64> = ratio.iter().zip(&qv).map(|(pq, v)| pq / v).collect();
        let hess = weighted_gram(&self.tables, n1, self.grid, &curvature);
        Some(Eval { value, grad, hess })
    }

    fn boundary_error(&self) -> Error {
        Error::BoundaryApproach
    }
}

/// P/Q estimate over the product grid, with solver diagnostics.
#[derive(Debug, Clone)]
pub struct MultiRational {
    numerator: MultiPolynomial,
    denominator: MultiPolynomial,
    iterations: usize,
    moment_residual: f64,
}

impl MultiRational {
    pub fn numerator(&self) -> &MultiPolynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &MultiPolynomial {
        &self.denominator
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn moment_residual(&self) -> f64 {
        self.moment_residual
    }

    pub fn density(&self, grid: &MultiGrid) -> Result<MultiGridDensity> {
        let p = self.numerator.evaluate_on(grid)?;
        let q = self.denominator.evaluate_on(grid)?;
        if let Some((node, &value)) = q.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::NonPositiveQ { node, value });
        }
        MultiGridDensity::new(
            grid.clone(),
            p.iter().zip(&q).map(|(pv, qv)| pv / qv).collect(),
        )
    }
}

/// Minimizes the multivariate dual; the returned density matches the moments
/// within 1e−7·r₀.
pub fn multi_solve_dual(
    moments: &[f64],
    prior: &MultiPolynomial,
    grid: &MultiGrid,
    opts: &SolverOptions,
) -> Result<MultiRational> {
    validate_problem(moments, prior.basis(), grid)?;
    let prior_values = prior.evaluate_on(grid)?;
    if let Some((node, &value)) = prior_values.iter().enumerate().find(|(_, v)| **v <= 0.0) {
        return Err(Error::NonPositiveDensity { node, value });
    }
    let dual = MultiDual {
        moments,
        tables: prior.basis().tables(grid),
        prior_values,
        grid,
    };
    let n1 = moments.len();
    let norm = grid.weight() / (2.0 * PI).powi(grid.dimension() as i32);
    let mean_prior = dual.prior_values.iter().sum::<f64>() * norm;
    let mut q0 = vec![0.0; n1];
    q0[0] = mean_prior / moments[0];

    let out = newton::minimize(&dual, q0, opts)?;
    let denominator = MultiPolynomial::new(prior.basis().clone(), out.x)?;
    let result = MultiRational {
        numerator: prior.clone(),
        denominator,
        iterations: out.iterations,
        moment_residual: 0.0,
    };
    let achieved = result.density(grid)?.moments(prior.basis())?;
    let residual = achieved
        .iter()
        .zip(moments)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if residual > MULTI_MOMENT_RESIDUAL_TOL * moments[0] {
        return Err(Error::MaxIterations(out.iterations));
    }
    Ok(MultiRational {
        moment_residual: residual,
        ..result
    })
}

struct MultiMaxEntDual<'a> {
    moments: &'a [f64],
    tables: Vec<f64>,
    grid: &'a MultiGrid,
}

const LAMBDA_LIMIT: f64 = 1e6;

impl MultiMaxEntDual<'_> {
    fn density_values(&self, lam: &[f64]) -> Option<Vec<f64>> {
        let total = self.grid.len();
        let mut exponent = vec![0.0; total];
        for (k, &c) in lam.iter().enumerate() {
            let row = &self.tables[k * total..(k + 1) * total];
            for (e, b) in exponent.iter_mut().zip(row) {
                *e += c * b;
            }
        }
        let values: Vec<f64> = exponent.iter().map(|l| (-1.0 - l).exp()).collect();
        if values.iter().all(|v| v.is_finite()) {
            Some(values)
        } else {
            None
        }
    }
}

impl DualObjective for MultiMaxEntDual<'_> {
    fn scale(&self) -> f64 {
        self.moments[0]
    }

    fn eval(&self, lam: &[f64]) -> Option<Eval> {
        if lam.iter().any(|l| l.abs() > LAMBDA_LIMIT) {
            return None;
        }
        let n1 = self.moments.len();
        let values = self.density_values(lam)?;
        let norm = self.grid.weight() / (2.0 * PI).powi(self.grid.dimension() as i32);
        let pairing: f64 = self.moments.iter().zip(lam).map(|(r, c)| r * c).sum();
        let value = values.iter().sum::<f64>() * norm + pairing;
        if !value.is_finite() {
            return None;
        }
        let achieved = moments_of(&values, &self.tables, n1, self.grid);
        let grad: Vec<f64> = self
            .moments
            .iter()
            .zip(&achieved)
            .map(|(r, m)| r - m)
            .collect();
        let hess = weighted_gram(&self.tables, n1, self.grid, &values);
        Some(Eval { value, grad, hess })
    }

    fn boundary_error(&self) -> Error {
        Error::NoInteriorSolution
    }
}

/// Maximum-entropy density exp(−1 − Σ λ_k β_k) over the product domain.
#[derive(Debug, Clone)]
pub struct MultiMaxEnt {
    basis: MultiBasis,
    lambdas: Vec<f64>,
    iterations: usize,
    moment_residual: f64,
}

impl MultiMaxEnt {
    pub fn basis(&self) -> &MultiBasis {
        &self.basis
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn moment_residual(&self) -> f64 {
        self.moment_residual
    }

    pub fn density(&self, grid: &MultiGrid) -> Result<MultiGridDensity> {
        let exponent =
            MultiPolynomial::new(self.basis.clone(), self.lambdas.clone())?.evaluate_on(grid)?;
        MultiGridDensity::new(
            grid.clone(),
            exponent.iter().map(|l| (-1.0 - l).exp()).collect(),
        )
    }

    /// Stationarity identity H[Φ̆] = (2π)^d·(r₀ + Σ λ_k r_k).
    pub fn entropy_closed_form(&self, moments: &[f64]) -> f64 {
        let d = self.basis.dimension() as i32;
        let pairing: f64 = self.lambdas.iter().zip(moments).map(|(l, r)| l * r).sum();
        (2.0 * PI).powi(d) * (moments[0] + pairing)
    }
}

pub(crate) fn multi_solve_maxent_with_start(
    moments: &[f64],
    basis: &MultiBasis,
    grid: &MultiGrid,
    opts: &SolverOptions,
    start: Option<&[f64]>,
) -> Result<MultiMaxEnt> {
    validate_problem(moments, basis, grid)?;
    let dual = MultiMaxEntDual {
        moments,
        tables: basis.tables(grid),
        grid,
    };
    let n1 = moments.len();
    let lam0 = match start {
        Some(s) if s.len() == n1 => s.to_vec(),
        _ => {
            let mut l = vec![0.0; n1];
            l[0] = -1.0 - moments[0].ln();
            l
        }
    };
    let out = newton::minimize(&dual, lam0, opts)?;
    let result = MultiMaxEnt {
        basis: basis.clone(),
        lambdas: out.x,
        iterations: out.iterations,
        moment_residual: 0.0,
    };
    let achieved = result.density(grid)?.moments(basis)?;
    let residual = achieved
        .iter()
        .zip(moments)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if residual > MULTI_MOMENT_RESIDUAL_TOL * moments[0] {
        return Err(Error::MaxIterations(out.iterations));
    }
    Ok(MultiMaxEnt {
        moment_residual: residual,
        ..result
    })
}

pub fn multi_solve_maxent(
    moments: &[f64],
    basis: &MultiBasis,
    grid: &MultiGrid,
    opts: &SolverOptions,
) -> Result<MultiMaxEnt> {
    multi_solve_maxent_with_start(moments, basis, grid, opts, None)
}

/// Box-constrained entropy maximization over moment vectors, mirroring the
/// univariate search. Feasibility of a candidate moment vector is certified
/// by inner-solve convergence, so the coordinate sweep first scans each
/// interval coarsely for a solvable sub-range and then refines by
/// golden-section.
pub struct MultiBoxMaxEnt {
    pub density: MultiMaxEnt,
    pub moments_at_optimum: Vec<f64>,
    pub entropy: f64,
}

pub fn multi_solve_maxent_box(
    lower: &[f64],
    upper: &[f64],
    basis: &MultiBasis,
    grid: &MultiGrid,
    opts: &SolverOptions,
) -> Result<MultiBoxMaxEnt> {
    if lower.len() != basis.len() || upper.len() != basis.len() {
        return Err(Error::Invalid("box bounds must match the basis size".into()));
    }
    if lower.iter().zip(upper).any(|(a, b)| a > b) {
        return Err(Error::Invalid("box has an empty interval".into()));
    }

    let entropy_at = |m: &[f64], warm: Option<&[f64]>| -> (f64, Option<MultiMaxEnt>) {
        match multi_solve_maxent_with_start(m, basis, grid, opts, warm) {
            Ok(d) => match d.density(grid) {
                Ok(dens) => (dens.entropy(), Some(d)),
                Err(_) => (f64::NEG_INFINITY, None),
            },
            Err(_) => (f64::NEG_INFINITY, None),
        }
    };

    let center: Vec<f64> = lower.iter().zip(upper).map(|(a, b)| 0.5 * (a + b)).collect();
    let mut starts = vec![center];
    if basis.len() <= 10 {
        for mask in 0..(1usize << basis.len()) {
            let corner: Vec<f64> = (0..basis.len())
                .map(|k| if mask >> k & 1 == 1 { upper[k] } else { lower[k] })
                .collect();
            starts.push(corner);
        }
    }

    let mut best: Option<(Vec<f64>, f64, MultiMaxEnt)> = None;
    for start in starts {
        let (h0, solved) = entropy_at(&start, None);
        let Some(solved) = solved else { continue };
        let mut warm = solved.lambdas().to_vec();
        let mut r = start;
        let mut h = h0;
        for _sweep in 0..30 {
            let mut improved = false;
            for k in 0..basis.len() {
                if upper[k] - lower[k] <= opts.step_tol {
                    continue;
                }
                // coarse feasibility scan, then golden-section refinement
                let scan = 16usize;
                let width = upper[k] - lower[k];
                let feasible = |t: f64, warm: &[f64]| {
                    let mut c = r.clone();
                    c[k] = t;
                    entropy_at(&c, Some(warm))
                };
                let mut lo = r[k];
                let mut hi = r[k];
                for s in 0..=scan {
                    let t = lower[k] + width * s as f64 / scan as f64;
                    if t < lo || t > hi {
                        let (f, _) = feasible(t, &warm);
                        if f > f64::NEG_INFINITY {
                            lo = lo.min(t);
                            hi = hi.max(t);
                        }
                    }
                }
                let golden: f64 = (5f64.sqrt() - 1.0) / 2.0;
                let (mut a, mut b) = (lo, hi);
                let mut x1 = b - golden * (b - a);
                let mut x2 = a + golden * (b - a);
                let (mut f1, _) = feasible(x1, &warm);
                let (mut f2, _) = feasible(x2, &warm);
                while b - a > opts.step_tol {
                    if f1 < f2 {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + golden * (b - a);
                        (f2, _) = feasible(x2, &warm);
                    } else {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - golden * (b - a);
                        (f1, _) = feasible(x1, &warm);
                    }
                }
                let t = 0.5 * (a + b);
                let (f, solved) = feasible(t, &warm);
                if f > h {
                    r[k] = t;
                    h = f;
                    if let Some(d) = solved {
                        warm = d.lambdas().to_vec();
                    }
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|(_, bh, _)| h > *bh) {
            let (_, solved) = entropy_at(&r, Some(&warm));
            if let Some(d) = solved {
                best = Some((r, h, d));
            }
        }
    }
    let (moments_at_optimum, entropy, density) = best.ok_or(Error::EmptyFeasibleBox)?;
    Ok(MultiBoxMaxEnt {
        density,
        moments_at_optimum,
        entropy,
    })
}
