//! Damped Newton minimization shared by the estimator and maximum-entropy
//! duals: Armijo backtracking with a feasibility guard, Hessian solved by
//! Cholesky (validating positive definiteness at every iterate).

use crate::error::{Error, Result};
use crate::linalg;
use crate::options::SolverOptions;

const ARMIJO_C: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MIN_STEP: f64 = 1e-14;
/// Stalled line searches are accepted as converged while the gradient is
/// within this factor of the target tolerance (still inside the 1e−8·r₀
/// moment-residual contract at the default 1e−10 tolerance).
const STALL_SLACK: f64 = 100.0;

pub(crate) struct Eval {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

/// A smooth strictly convex objective over an open feasible set.
/// `eval` returns `None` outside the set (or where the value overflows).
pub(crate) trait DualObjective {
    /// Scale for relative tolerances (r₀ of the moment data).
    fn scale(&self) -> f64;
    fn eval(&self, x: &[f64]) -> Option<Eval>;
    /// Error to report when iterates are driven against the feasible
    /// boundary without interior progress.
    fn boundary_error(&self) -> Error;
}

pub(crate) struct NewtonOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub grad_inf_norm: f64,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn minimize(
    obj: &dyn DualObjective,
    x0: Vec<f64>,
    opts: &SolverOptions,
) -> Result<NewtonOutcome> {
    let n = x0.len();
    let tol = opts.tolerance * obj.scale();
    let mut x = x0;
    let mut cur = obj
        .eval(&x)
        .ok_or_else(|| Error::Invalid("infeasible starting point".into()))?;

    for it in 0..opts.max_iterations {
        let g_norm = inf_norm(&cur.grad);
        if g_norm <= tol {
            return Ok(NewtonOutcome {
                x,
                iterations: it,
                grad_inf_norm: g_norm,
            });
        }

        // Newton direction from the (required PD) Hessian
        let l = linalg::cholesky(&cur.hess, n, 0.0)
            .map_err(|_| Error::Invalid("dual Hessian lost positive definiteness".into()))?;
        let step = linalg::cholesky_solve(&l, n, &cur.grad);
        let decrement = cur
            .grad
            .iter()
            .zip(&step)
            .map(|(g, d)| g * d)
            .sum::<f64>();

        // Armijo backtracking with absolute slack so that progress below
        // floating-point resolution of the value does not stall the search.
        let eps = 1e-14 * (1.0 + cur.value.abs());
        let mut t = 1.0;
        let mut hit_boundary = false;
        let mut accepted = None;
        while t >= MIN_STEP {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(xi, d)| xi - t * d).collect();
            match obj.eval(&trial) {
                Some(e) if e.value <= cur.value - ARMIJO_C * t * decrement + eps => {
                    accepted = Some((trial, e));
                    break;
                }
                Some(_) => {}
                None => hit_boundary = true,
            }
            t *= BACKTRACK;
        }

        match accepted {
            Some((trial, e)) => {
                x = trial;
                cur = e;
            }
            None => {
                // No acceptable step. At the floating-point floor this is
                // convergence; anywhere else it signals boundary trouble.
                if g_norm <= STALL_SLACK * tol {
                    return Ok(NewtonOutcome {
                        x,
                        iterations: it,
                        grad_inf_norm: g_norm,
                    });
                }
                return Err(if hit_boundary {
                    obj.boundary_error()
                } else {
                    Error::MaxIterations(it)
                });
            }
        }
    }

    let g_norm = inf_norm(&cur.grad);
    if g_norm <= STALL_SLACK * tol {
        return Ok(NewtonOutcome {
            x,
            iterations: opts.max_iterations,
            grad_inf_norm: g_norm,
        });
    }
    Err(Error::MaxIterations(opts.max_iterations))
}
