//! Maximum-entropy spectral densities under trigonometric moment constraints,
//! in exact-moment and box-constrained variants.
//!
//! The entropy maximizer subject to r_k = (1/2π)∫cos(kθ)Φ dθ has the form
//! Φ̆(θ) = exp(−1 − λ₀ − 2·Σ_{k≥1} λ_k cos kθ); the coefficients solve the
//! smooth convex dual
//!
//! ```text
//! F(λ) = (1/2π)·∫ exp(−1 − Λ(θ)) dθ + λ₀r₀ + 2·Σ_{k≥1} λ_k r_k
//! ```
//!
//! whose gradient is again the moment mismatch. The entropy of the solution
//! obeys the closed form H[Φ̆] = 2π·r₀·(1+λ₀) + 4π·Σ_{k≥1} λ_k r_k (the
//! stationarity identity restated for the real cosine convention).

use std::f64::consts::PI;

use crate::covariance::{toeplitz_positive_definite, CovarianceSequence};
use crate::density::GridDensity;
use crate::error::{Error, Result};
use crate::grid::{cosine_table, AngularGrid};
use crate::newton::{self, DualObjective, Eval};
use crate::options::SolverOptions;
use crate::poly::TrigPolynomial;

/// Guard against dual divergence: coefficient magnitudes beyond this are
/// treated as "no interior solution".
const LAMBDA_LIMIT: f64 = 1e6;

/// Lagrange-coefficient form Φ̆ = exp(−1 − λ₀ − 2·Σ λ_k cos kθ).
#[derive(Debug, Clone)]
pub struct MaxEntDensity {
    lambdas: Vec<f64>,
    iterations: usize,
    gradient_norm: f64,
    moment_residual: f64,
}

impl MaxEntDensity {
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn order(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn gradient_norm(&self) -> f64 {
        self.gradient_norm
    }

    pub fn moment_residual(&self) -> f64 {
        self.moment_residual
    }

    /// The exponent polynomial Λ(θ) = λ₀ + 2·Σ λ_k cos kθ.
    pub fn exponent(&self) -> TrigPolynomial {
        TrigPolynomial::new(self.lambdas.clone()).expect("validated at construction")
    }

    /// exp(−1 − Λ) on a grid; strictly positive by construction.
    pub fn density(&self, grid: AngularGrid) -> GridDensity {
        let values = self
            .exponent()
            .evaluate_on(&grid)
            .into_iter()
            .map(|l| (-1.0 - l).exp())
            .collect();
        GridDensity::new(grid, values).expect("exponential is positive")
    }

    /// Closed-form entropy at the solved moments:
    /// 2π·r₀·(1+λ₀) + 4π·Σ_{k≥1} λ_k r_k.
    pub fn entropy_closed_form(&self, lags: &[f64]) -> f64 {
        let tail: f64 = self
            .lambdas
            .iter()
            .zip(lags)
            .skip(1)
            .map(|(l, r)| l * r)
            .sum();
        2.0 * PI * lags[0] * (1.0 + self.lambdas[0]) + 4.0 * PI * tail
    }
}

struct MaxEntDual<'a> {
    lags: &'a [f64],
    grid: AngularGrid,
    cos: Vec<f64>,
    weights: Vec<f64>,
}

impl<'a> MaxEntDual<'a> {
    fn new(lags: &'a [f64], grid: AngularGrid) -> Self {
        let n = lags.len() - 1;
        let mut weights = vec![2.0; n + 1];
        weights[0] = 1.0;
        Self {
            lags,
            grid,
            cos: cosine_table(&grid, n),
            weights,
        }
    }

    fn density_values(&self, lam: &[f64]) -> Option<Vec<f64>> {
        let m = self.grid.size();
        let mut exponent = vec![lam[0]; m];
        for (k, &c) in lam.iter().enumerate().skip(1) {
            let row = &self.cos[k * m..(k + 1) * m];
            for (e, t) in exponent.iter_mut().zip(row) {
                *e += 2.0 * c * t;
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

impl DualObjective for MaxEntDual<'_> {
    fn scale(&self) -> f64 {
        self.lags[0]
    }

    fn eval(&self, lam: &[f64]) -> Option<Eval> {
        if lam.iter().any(|l| l.abs() > LAMBDA_LIMIT) {
            return None;
        }
        let m = self.grid.size();
        let n = self.lags.len() - 1;
        let values = self.density_values(lam)?;
        let quad = self.grid.weight() / (2.0 * PI);

        let pairing: f64 = (0..=n).map(|k| self.weights[k] * lam[k] * self.lags[k]).sum();
        let value = values.iter().sum::<f64>() * quad + pairing;
        if !value.is_finite() {
            return None;
        }

        let grad: Vec<f64> = (0..=n)
            .map(|k| {
                let row = &self.cos[k * m..(k + 1) * m];
                let moment = row.iter().zip(&values).map(|(c, v)| c * v).sum::<f64>() * quad;
                self.weights[k] * (self.lags[k] - moment)
            })
            .collect();

        let mut hess = vec![0.0; (n + 1) * (n + 1)];
        for j in 0..=n {
            let rj = &self.cos[j * m..(j + 1) * m];
            for k in j..=n {
                let rk = &self.cos[k * m..(k + 1) * m];
                let mut s = 0.0;
                for i in 0..m {
                    s += rj[i] * rk[i] * values[i];
                }
                let v = self.weights[j] * self.weights[k] * s * quad;
                hess[j * (n + 1) + k] = v;
                hess[k * (n + 1) + j] = v;
            }
        }

        Some(Eval { value, grad, hess })
    }

    fn boundary_error(&self) -> Error {
        Error::NoInteriorSolution
    }
}

fn solve_with_start(
    lags: &[f64],
    grid: AngularGrid,
    opts: &SolverOptions,
    start: Option<&[f64]>,
) -> Result<MaxEntDensity> {
    let n = lags.len() - 1;
    if 2 * n >= grid.size() {
        return Err(Error::Aliasing {
            order: n,
            grid: grid.size(),
        });
    }
    let dual = MaxEntDual::new(lags, grid);
    let lam0 = match start {
        Some(s) if s.len() == n + 1 => s.to_vec(),
        _ => {
            // flat-density guess exp(−1−λ₀) ≡ r₀
            let mut l = vec![0.0; n + 1];
            l[0] = -1.0 - lags[0].ln();
            l
        }
    };
    let out = newton::minimize(&dual, lam0, opts)?;

    let result = MaxEntDensity {
        lambdas: out.x,
        iterations: out.iterations,
        gradient_norm: out.grad_inf_norm,
        moment_residual: 0.0,
    };
    let achieved = result.density(grid).raw_lags(n)?;
    let residual = achieved
        .iter()
        .zip(lags)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if residual > 1e-8 * lags[0] {
        return Err(Error::MaxIterations(out.iterations));
    }
    Ok(MaxEntDensity {
        moment_residual: residual,
        ..result
    })
}

/// Entropy maximizer matching the lag window exactly.
pub fn solve_maxent(
    lags: &CovarianceSequence,
    grid: AngularGrid,
    opts: &SolverOptions,
) -> Result<MaxEntDensity> {
    solve_with_start(lags.lags(), grid, opts, None)
}

/// Same solve from an explicit starting coefficient vector (warm starts).
pub fn solve_maxent_from(
    lags: &CovarianceSequence,
    grid: AngularGrid,
    opts: &SolverOptions,
    start: &[f64],
) -> Result<MaxEntDensity> {
    solve_with_start(lags.lags(), grid, opts, Some(start))
}

/// Returns (H[Φ̆] by quadrature, closed-form stationarity value). The two
/// agree to roundoff for a converged solve.
pub fn maxent_entropy_identity_check(
    density: &MaxEntDensity,
    lags: &CovarianceSequence,
    grid: AngularGrid,
) -> (f64, f64) {
    (
        density.density(grid).entropy(),
        density.entropy_closed_form(lags.lags()),
    )
}

/// Per-lag interval constraints a_k ≤ r̃_k ≤ b_k.
#[derive(Debug, Clone, PartialEq)]
pub struct LagBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LagBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Invalid("box needs matching nonempty bounds".into()));
        }
        for (k, (a, b)) in lower.iter().zip(&upper).enumerate() {
            if !a.is_finite() || !b.is_finite() || a > b {
                return Err(Error::Invalid(format!(
                    "box interval {k} is invalid: [{a}, {b}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Box centered at `center` with half-width `delta`·center[0] per lag.
    pub fn around(center: &[f64], delta: f64) -> Result<Self> {
        if center.is_empty() || delta < 0.0 {
            return Err(Error::Invalid("need a center and delta ≥ 0".into()));
        }
        let half = delta * center[0];
        Self::new(
            center.iter().map(|c| c - half).collect(),
            center.iter().map(|c| c + half).collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.lower.len() - 1
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub fn contains(&self, lags: &[f64]) -> bool {
        lags.len() == self.lower.len()
            && lags
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(r, (a, b))| a <= r && r <= b)
    }

    /// All 2^(n+1) corner points.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let n1 = self.lower.len();
        assert!(n1 <= 16, "corner enumeration is desk-scale only");
        (0..1usize << n1)
            .map(|mask| {
                (0..n1)
                    .map(|k| {
                        if mask >> k & 1 == 1 {
                            self.upper[k]
                        } else {
                            self.lower[k]
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Result of the box-constrained entropy maximization.
#[derive(Debug, Clone)]
pub struct BoxMaxEnt {
    pub density: MaxEntDensity,
    pub lags_at_optimum: Vec<f64>,
    pub entropy: f64,
}

struct BoxSearch<'a> {
    grid: AngularGrid,
    opts: &'a SolverOptions,
}

impl BoxSearch<'_> {
    /// Entropy of the maxent density at PD point r, warm-started; −∞ when the
    /// inner solve fails.
    fn entropy_at(&self, r: &[f64], warm: Option<&[f64]>) -> (f64, Option<MaxEntDensity>) {
        if !toeplitz_positive_definite(r) {
            return (f64::NEG_INFINITY, None);
        }
        match solve_with_start(r, self.grid, self.opts, warm) {
            Ok(d) => (d.density(self.grid).entropy(), Some(d)),
            Err(_) => (f64::NEG_INFINITY, None),
        }
    }

    /// Largest sub-interval of [lo, hi] around `feasible` on which the lag
    /// vector stays PD along coordinate k, found by bisection.
    fn feasible_interval(&self, r: &[f64], k: usize, lo: f64, hi: f64) -> (f64, f64) {
        let probe = |t: f64| {
            let mut c = r.to_vec();
            c[k] = t;
            toeplitz_positive_definite(&c)
        };
        let shrink = |mut bad: f64| {
            if probe(bad) {
                return bad;
            }
            let mut good = r[k];
            for _ in 0..60 {
                let mid = 0.5 * (bad + good);
                if probe(mid) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            good
        };
        (shrink(lo), shrink(hi))
    }

    /// Golden-section maximization of the inner entropy along coordinate k.
    fn ascend_coordinate(
        &self,
        r: &mut [f64],
        k: usize,
        bounds: (f64, f64),
        warm: &mut Vec<f64>,
        best: &mut f64,
    ) -> bool {
        let (mut lo, mut hi) = self.feasible_interval(r, k, bounds.0, bounds.1);
        if hi - lo <= self.opts.step_tol {
            return false;
        }
        let golden: f64 = (5f64.sqrt() - 1.0) / 2.0;
        let at = |t: f64, warm: &[f64]| {
            let mut c = r.to_vec();
            c[k] = t;
            self.entropy_at(&c, Some(warm))
        };
        let mut x1 = hi - golden * (hi - lo);
        let mut x2 = lo + golden * (hi - lo);
        let (mut f1, _) = at(x1, warm);
        let (mut f2, _) = at(x2, warm);
        while hi - lo > self.opts.step_tol {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + golden * (hi - lo);
                (f2, _) = at(x2, warm);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - golden * (hi - lo);
                (f1, _) = at(x1, warm);
            }
        }
        let t = 0.5 * (lo + hi);
        let (f, solved) = at(t, warm);
        if f > *best {
            r[k] = t;
            *best = f;
            if let Some(d) = solved {
                *warm = d.lambdas().to_vec();
            }
            true
        } else {
            false
        }
    }

    /// Coordinate-ascent from one feasible start.
    fn ascend_from(
        &self,
        box_: &LagBox,
        start: Vec<f64>,
    ) -> Option<(Vec<f64>, f64, MaxEntDensity)> {
        let (mut best, solved) = self.entropy_at(&start, None);
        let mut warm = solved?.lambdas().to_vec();
        let mut r = start;
        let n1 = r.len();
        for _sweep in 0..50 {
            let mut improved = false;
            for k in 0..n1 {
                improved |= self.ascend_coordinate(
                    &mut r,
                    k,
                    (box_.lower()[k], box_.upper()[k]),
                    &mut warm,
                    &mut best,
                );
            }
            if !improved {
                // certify: no coordinate step of size step_tol improves
                let certified = (0..n1).all(|k| {
                    [-self.opts.step_tol, self.opts.step_tol].iter().all(|d| {
                        let t = (r[k] + d).clamp(box_.lower()[k], box_.upper()[k]);
                        let mut c = r.clone();
                        c[k] = t;
                        let (f, _) = self.entropy_at(&c, Some(warm.as_slice()));
                        f <= best + 1e-12 * (1.0 + best.abs())
                    })
                });
                if certified {
                    break;
                }
            }
        }
        let (entropy, density) = self.entropy_at(&r, Some(warm.as_slice()));
        density.map(|d| (r, entropy, d))
    }
}

/// Maximizes H[Φ̆(r̃)] over lag vectors r̃ in the box, by coordinate-wise
/// golden-section ascent with inner maxent solves, restarted from the center
/// and every PD-feasible corner.
pub fn solve_maxent_box(
    box_: &LagBox,
    grid: AngularGrid,
    opts: &SolverOptions,
) -> Result<BoxMaxEnt> {
    let search = BoxSearch { grid, opts };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    let center = box_.center();
    if toeplitz_positive_definite(&center) {
        starts.push(center);
    }
    for corner in box_.corners() {
        if toeplitz_positive_definite(&corner) {
            starts.push(corner);
        }
    }
    if starts.is_empty() {
        // coarse lattice scan for a feasibility witness
        let n1 = box_.lower().len();
        if n1 <= 10 {
            let mut idx = vec![0usize; n1];
            'scan: loop {
                let point: Vec<f64> = (0..n1)
                    .map(|k| {
                        box_.lower()[k] + (box_.upper()[k] - box_.lower()[k]) * idx[k] as f64 / 2.0
                    })
                    .collect();
                if toeplitz_positive_definite(&point) {
                    starts.push(point);
                    break;
                }
                for slot in idx.iter_mut() {
                    *slot += 1;
                    if *slot <= 2 {
                        continue 'scan;
                    }
                    *slot = 0;
                }
                break;
            }
        }
    }
    if starts.is_empty() {
        return Err(Error::EmptyFeasibleBox);
    }

    let mut best: Option<(Vec<f64>, f64, MaxEntDensity)> = None;
    for start in starts {
        if let Some((r, h, d)) = search.ascend_from(box_, start) {
            if best.as_ref().is_none_or(|(_, bh, _)| h > *bh) {
                best = Some((r, h, d));
            }
        }
    }
    let (lags_at_optimum, entropy, density) = best.ok_or(Error::EmptyFeasibleBox)?;
    Ok(BoxMaxEnt {
        density,
        lags_at_optimum,
        entropy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> AngularGrid {
        AngularGrid::new(1024).unwrap()
    }

    #[test]
    fn flat_window_gives_flat_density() {
        let lags = CovarianceSequence::new(vec![1.0, 0.0, 0.0]).unwrap();
        let me = solve_maxent(&lags, grid(), &SolverOptions::default()).unwrap();
        assert!((me.lambdas()[0] + 1.0).abs() < 1e-10);
        assert!(me.lambdas()[1].abs() < 1e-10);
        let d = me.density(grid());
        assert!(d.values().iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn constant_window_gives_constant_density() {
        let c = 2.5;
        let lags = CovarianceSequence::new(vec![c, 0.0]).unwrap();
        let me = solve_maxent(&lags, grid(), &SolverOptions::default()).unwrap();
        assert!((me.lambdas()[0] - (-1.0 - c.ln())).abs() < 1e-10);
        let d = me.density(grid());
        assert!(d.values().iter().all(|v| (v - c).abs() < 1e-9));
    }

    #[test]
    fn entropy_identity_holds() {
        for lags in [vec![1.0, 0.0], vec![2.5, 0.0], vec![4.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0]] {
            let w = CovarianceSequence::new(lags).unwrap();
            let me = solve_maxent(&w, grid(), &SolverOptions::default()).unwrap();
            let (hq, hc) = maxent_entropy_identity_check(&me, &w, grid());
            assert!(
                (hq - hc).abs() <= 1e-8 * (1.0 + hq.abs()),
                "quadrature {hq} vs closed form {hc}"
            );
        }
    }

    #[test]
    fn maxent_dominates_ar1() {
        use crate::estimator::{solve_dual, EstimatorProblem};
        let lags = CovarianceSequence::new(vec![4.0 / 3.0, 2.0 / 3.0]).unwrap();
        let me = solve_maxent(&lags, grid(), &SolverOptions::default()).unwrap();
        let problem =
            EstimatorProblem::new(lags.clone(), TrigPolynomial::one(), grid()).unwrap();
        let ar = solve_dual(&problem, &SolverOptions::default()).unwrap();
        let h_me = me.density(grid()).entropy();
        let h_ar = ar.density(grid()).unwrap().entropy();
        assert!(h_me >= h_ar - 1e-8, "{h_me} < {h_ar}");
    }

    #[test]
    fn singleton_box_reduces_to_exact_solve() {
        let lags = vec![1.0, 0.3];
        let box_ = LagBox::new(lags.clone(), lags.clone()).unwrap();
        let out = solve_maxent_box(&box_, grid(), &SolverOptions::default()).unwrap();
        let exact = solve_maxent(
            &CovarianceSequence::new(lags.clone()).unwrap(),
            grid(),
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(out.lags_at_optimum, lags);
        for (a, b) in out.density.lambdas().iter().zip(exact.lambdas()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn box_beats_center_entropy() {
        // box (1 ± 0.1, 0 ± 0.1): the optimum keeps r1 = 0 and picks r0 on a
        // box face; the contract checked here is H(opt) ≥ H(center).
        let box_ = LagBox::new(vec![0.9, -0.1], vec![1.1, 0.1]).unwrap();
        let out = solve_maxent_box(&box_, grid(), &SolverOptions::default()).unwrap();
        let center = solve_maxent(
            &CovarianceSequence::new(box_.center()).unwrap(),
            grid(),
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(out.entropy >= center.density(grid()).entropy() - 1e-9);
        assert!(out.lags_at_optimum[1].abs() < 1e-3, "{:?}", out.lags_at_optimum);
    }

    #[test]
    fn infeasible_box_rejected() {
        let box_ = LagBox::new(vec![1.0, 2.0], vec![1.0, 3.0]).unwrap();
        assert!(matches!(
            solve_maxent_box(&box_, grid(), &SolverOptions::default()),
            Err(Error::EmptyFeasibleBox)
        ));
    }

    #[test]
    fn box_validation() {
        assert!(LagBox::new(vec![1.0], vec![0.5]).is_err());
        assert!(LagBox::new(vec![], vec![]).is_err());
        let b = LagBox::around(&[1.0, 0.5], 0.1).unwrap();
        assert_eq!(b.lower(), &[0.9, 0.4]);
        assert_eq!(b.upper(), &[1.1, 0.6]);
        assert!(b.contains(&[1.0, 0.5]));
        assert!(!b.contains(&[1.2, 0.5]));
        assert_eq!(b.corners().len(), 4);
    }
}
