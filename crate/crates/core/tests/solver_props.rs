//! Estimator and maxent solver properties: finite-difference gradient
//! agreement, uniqueness across starting data, moment matching, entropy
//! dominance, the stationarity identity, and box-search contracts.

mod common;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use specbound::maxent::BoxMaxEnt;
use specbound::{
    dual_value_and_gradient, maxent_entropy_identity_check, solve_dual, solve_dual_from,
    solve_maxent, solve_maxent_box, solve_maxent_from, AngularGrid, CovarianceSequence,
    EstimatorProblem, GridDensity, LagBox, SolverOptions, TrigPolynomial,
};

fn grid() -> AngularGrid {
    AngularGrid::new(1024).unwrap()
}

fn random_window(rng: &mut StdRng, order: usize) -> CovarianceSequence {
    let density = common::random_positive_density(rng, order + 1, grid());
    density.compute_lags(order).expect("positive density is PD")
}

/// Maxent dual value computed from public primitives only, used as the
/// independent finite-difference reference for the solver's stationarity.
fn maxent_dual_value(lam: &[f64], lags: &[f64], grid: AngularGrid) -> f64 {
    let exponent = TrigPolynomial::new(lam.to_vec()).unwrap();
    let density: Vec<f64> = exponent
        .evaluate_on(&grid)
        .into_iter()
        .map(|l| (-1.0 - l).exp())
        .collect();
    let integral = grid.integrate(&density) / (2.0 * std::f64::consts::PI);
    let pairing: f64 = lags
        .iter()
        .enumerate()
        .map(|(k, r)| if k == 0 { lam[0] * r } else { 2.0 * lam[k] * r })
        .sum();
    integral + pairing
}

fn maxent_dual_gradient(lam: &[f64], lags: &[f64], grid: AngularGrid) -> Vec<f64> {
    let exponent = TrigPolynomial::new(lam.to_vec()).unwrap();
    let values: Vec<f64> = exponent
        .evaluate_on(&grid)
        .into_iter()
        .map(|l| (-1.0 - l).exp())
        .collect();
    let density = GridDensity::new(grid, values).unwrap();
    let achieved = density.raw_lags(lags.len() - 1).unwrap();
    lags.iter()
        .zip(&achieved)
        .enumerate()
        .map(|(k, (r, m))| if k == 0 { r - m } else { 2.0 * (r - m) })
        .collect()
}

#[test]
fn estimator_gradient_matches_finite_differences() {
    let mut rng = StdRng::seed_from_u64(1);
    for case in 0..20 {
        let order = rng.gen_range(1..=4);
        let window = random_window(&mut rng, order);
        let prior = if case % 2 == 0 {
            TrigPolynomial::one()
        } else {
            TrigPolynomial::new(vec![1.0, 0.25]).unwrap()
        };
        let problem = EstimatorProblem::new(window.clone(), prior, grid()).unwrap();
        // random interior point near the feasible start
        let mut q = vec![0.0; order + 1];
        q[0] = 1.0 / window.r0() + rng.gen::<f64>() * 0.1;
        for qk in q.iter_mut().skip(1) {
            *qk = (rng.gen::<f64>() - 0.5) * 0.05 / window.r0();
        }
        let poly = TrigPolynomial::new(q.clone()).unwrap();
        let (_, analytic) = dual_value_and_gradient(&poly, &problem).unwrap();
        let h = 1e-6;
        for k in 0..=order {
            let mut plus = q.clone();
            plus[k] += h;
            let mut minus = q.clone();
            minus[k] -= h;
            let (vp, _) =
                dual_value_and_gradient(&TrigPolynomial::new(plus).unwrap(), &problem).unwrap();
            let (vm, _) =
                dual_value_and_gradient(&TrigPolynomial::new(minus).unwrap(), &problem).unwrap();
            let fd = (vp - vm) / (2.0 * h);
            let scale = fd.abs().max(analytic[k].abs()).max(1.0);
            assert!(
                (fd - analytic[k]).abs() <= 1e-6 * scale,
                "case {case} k={k}: fd {fd} vs analytic {}",
                analytic[k]
            );
        }
    }
}

#[test]
fn maxent_gradient_matches_finite_differences() {
    let mut rng = StdRng::seed_from_u64(2);
    for _case in 0..20 {
        let order = rng.gen_range(1..=4);
        let window = random_window(&mut rng, order);
        let mut lam = vec![0.0; order + 1];
        lam[0] = -1.0 - window.r0().ln() + (rng.gen::<f64>() - 0.5) * 0.2;
        for l in lam.iter_mut().skip(1) {
            *l = (rng.gen::<f64>() - 0.5) * 0.2;
        }
        let analytic = maxent_dual_gradient(&lam, window.lags(), grid());
        let h = 1e-6;
        for k in 0..=order {
            let mut plus = lam.clone();
            plus[k] += h;
            let mut minus = lam.clone();
            minus[k] -= h;
            let fd = (maxent_dual_value(&plus, window.lags(), grid())
                - maxent_dual_value(&minus, window.lags(), grid()))
                / (2.0 * h);
            let scale = fd.abs().max(analytic[k].abs()).max(1.0);
            assert!(
                (fd - analytic[k]).abs() <= 1e-6 * scale,
                "k={k}: fd {fd} vs {}",
                analytic[k]
            );
        }
    }
}

#[test]
fn moment_matching_and_uniqueness() {
    let mut rng = StdRng::seed_from_u64(3);
    let opts = SolverOptions::default();
    for _ in 0..15 {
        let order = rng.gen_range(1..=5);
        let window = random_window(&mut rng, order);
        let problem =
            EstimatorProblem::new(window.clone(), TrigPolynomial::one(), grid()).unwrap();
        let a = solve_dual(&problem, &opts).unwrap();
        assert!(a.moment_residual() <= 1e-8 * window.r0());
        // a second solve from a different interior start lands on the same Q
        let mut start = vec![0.0; order + 1];
        start[0] = 2.5 / window.r0() + rng.gen::<f64>();
        for c in start.iter_mut().skip(1) {
            *c = (rng.gen::<f64>() - 0.5) * 0.02 / window.r0();
        }
        let b =
            solve_dual_from(&problem, &opts, &TrigPolynomial::new(start).unwrap()).unwrap();
        for (x, y) in a.denominator().coeffs().iter().zip(b.denominator().coeffs()) {
            assert!((x - y).abs() <= 1e-7, "{x} vs {y}");
        }
        // maxent minimizer is unique in the same sense
        let ma = solve_maxent(&window, grid(), &opts).unwrap();
        let mut lam0 = vec![0.0; order + 1];
        lam0[0] = -1.0 - window.r0().ln() + 0.5;
        let mb = solve_maxent_from(&window, grid(), &opts, &lam0).unwrap();
        for (x, y) in ma.lambdas().iter().zip(mb.lambdas()) {
            assert!((x - y).abs() <= 1e-7, "{x} vs {y}");
        }
    }
}

#[test]
fn maxent_dominates_every_matching_density() {
    let mut rng = StdRng::seed_from_u64(4);
    let opts = SolverOptions::default();
    for case in 0..10 {
        let order = rng.gen_range(1..=4);
        let window = random_window(&mut rng, order);
        let me = solve_maxent(&window, grid(), &opts).unwrap();
        let h_me = me.density(grid()).entropy();

        // the rational estimate matches the same window
        let prior = if case % 2 == 0 {
            TrigPolynomial::one()
        } else {
            TrigPolynomial::new(vec![1.0, -0.2]).unwrap()
        };
        let problem = EstimatorProblem::new(window.clone(), prior, grid()).unwrap();
        let rational = solve_dual(&problem, &opts).unwrap();
        let d = rational.density(grid()).unwrap();
        let h_d = d.entropy();
        assert!(h_me >= h_d - 1e-8, "case {case}: {h_me} < {h_d}");

        // KL identity: KL(D ‖ maxent) = H[maxent] − H[D]
        let kl = d.kl_divergence(&me.density(grid())).unwrap();
        assert!(
            (kl - (h_me - h_d)).abs() <= 1e-7 * (1.0 + kl.abs()),
            "case {case}: KL {kl} vs gap {}",
            h_me - h_d
        );
        common::assert_log_inequality(&d, "rational");
        common::assert_log_inequality(&me.density(grid()), "maxent");
    }
}

#[test]
fn entropy_identity_on_random_windows() {
    let mut rng = StdRng::seed_from_u64(5);
    let opts = SolverOptions::default();
    for _ in 0..10 {
        let window = random_window(&mut rng, 3);
        let me = solve_maxent(&window, grid(), &opts).unwrap();
        let (hq, hc) = maxent_entropy_identity_check(&me, &window, grid());
        assert!(
            (hq - hc).abs() <= 1e-8 * (1.0 + hq.abs()),
            "quadrature {hq} vs closed form {hc}"
        );
    }
}

#[test]
fn box_solve_dominates_center_and_corners() {
    let opts = SolverOptions::default();
    let window = common::ar1_lags(0.5, 1.0, 2);
    let box_ = LagBox::around(&window, 0.05).unwrap();
    let BoxMaxEnt {
        entropy: h_opt,
        lags_at_optimum,
        ..
    } = solve_maxent_box(&box_, grid(), &opts).unwrap();
    assert!(box_.contains(&lags_at_optimum));

    let h_center = solve_maxent(
        &CovarianceSequence::new(box_.center()).unwrap(),
        grid(),
        &opts,
    )
    .unwrap()
    .density(grid())
    .entropy();
    assert!(h_opt >= h_center - 1e-9);

    for corner in box_.corners() {
        if let Ok(w) = CovarianceSequence::new(corner.clone()) {
            let h = solve_maxent(&w, grid(), &opts)
                .unwrap()
                .density(grid())
                .entropy();
            assert!(h_opt >= h - 1e-6, "corner {corner:?}: {h} > {h_opt}");
        }
    }
}

#[test]
fn box_search_matches_exhaustive_grid_oracle() {
    // 21×21 exhaustive reference search over the (1 ± 0.1, 0 ± 0.1) box
    let opts = SolverOptions::default();
    let g = AngularGrid::new(512).unwrap();
    let box_ = LagBox::new(vec![0.9, -0.1], vec![1.1, 0.1]).unwrap();
    let out = solve_maxent_box(&box_, g, &opts).unwrap();

    let mut best = f64::NEG_INFINITY;
    let mut best_point = (0.0, 0.0);
    for i in 0..=20 {
        for j in 0..=20 {
            let r0 = 0.9 + 0.2 * i as f64 / 20.0;
            let r1 = -0.1 + 0.2 * j as f64 / 20.0;
            let Ok(w) = CovarianceSequence::new(vec![r0, r1]) else {
                continue;
            };
            if let Ok(me) = solve_maxent(&w, g, &opts) {
                let h = me.density(g).entropy();
                if h > best {
                    best = h;
                    best_point = (r0, r1);
                }
            }
        }
    }
    assert!(
        out.entropy >= best - 1e-4,
        "search {} vs oracle {best} at {best_point:?}",
        out.entropy
    );
}
