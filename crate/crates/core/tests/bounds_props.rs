//! Bound-assembly properties: the triangle decomposition behind the noise
//! bound, report auditability, monotonicity in the box width, and the
//! Monte Carlo ordering of the noise bound.

mod common;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use specbound::bounds::{
    finite_sample_tv_upper_bound, kl_lower_bound, noise_tv_upper_bound, tv_from_kl, TermRole,
};
use specbound::cli::run_noise_scenario;
use specbound::sampling::{assess_box_marginal, ProcessModel};
use specbound::{
    solve_dual, solve_maxent, AngularGrid, CovarianceSequence, EstimatorProblem, LagBox,
    SolverOptions, TrigPolynomial,
};

fn grid() -> AngularGrid {
    AngularGrid::new(1024).unwrap()
}

#[test]
fn tv_from_kl_monotone_on_random_pairs() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let a = rng.gen::<f64>() * 5.0;
        let b = rng.gen::<f64>() * 5.0;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if hi - lo < 1e-12 {
            continue;
        }
        assert!(tv_from_kl(lo).unwrap() < tv_from_kl(hi).unwrap());
    }
}

/// The decomposition tv(Φ̃, Φ) ≤ tv(Φ̃, Φ̆̃) + tv(Φ̆̃, Φ̆) + tv(Φ̆, Φ) behind
/// the noise bound, checked on solver-produced quadruples.
#[test]
fn triangle_decomposition_on_computed_quadruples() {
    let mut rng = StdRng::seed_from_u64(12);
    let opts = SolverOptions::default();
    for _ in 0..8 {
        let order = rng.gen_range(1..=3);
        let truth = common::random_positive_density(&mut rng, order + 2, grid());
        let clean = truth.compute_lags(order).unwrap();
        let mut noise = vec![0.0; order + 1];
        noise[0] = rng.gen::<f64>() * 0.3;
        let noisy = CovarianceSequence::new(
            clean
                .lags()
                .iter()
                .zip(&noise)
                .map(|(a, b)| a + b)
                .collect(),
        )
        .unwrap();

        let estimate = solve_dual(
            &EstimatorProblem::new(noisy.clone(), TrigPolynomial::one(), grid()).unwrap(),
            &opts,
        )
        .unwrap()
        .density(grid())
        .unwrap();
        let maxent_noisy = solve_maxent(&noisy, grid(), &opts).unwrap().density(grid());
        let maxent_clean = solve_maxent(&clean, grid(), &opts).unwrap().density(grid());

        let lhs = estimate.tv_distance(&truth).unwrap();
        let rhs = estimate.tv_distance(&maxent_noisy).unwrap()
            + maxent_noisy.tv_distance(&maxent_clean).unwrap()
            + maxent_clean.tv_distance(&truth).unwrap();
        assert!(lhs <= rhs + 1e-10, "{lhs} > {rhs}");

        common::assert_log_inequality(&estimate, "estimate");
        common::assert_log_inequality(&maxent_noisy, "maxent noisy");
        common::assert_log_inequality(&maxent_clean, "maxent clean");
    }
}

#[test]
fn reports_recompute_bitwise_from_terms() {
    let opts = SolverOptions::default();
    let clean = CovarianceSequence::new(common::ar1_lags(0.5, 1.0, 2)).unwrap();
    let report = noise_tv_upper_bound(
        &clean,
        &[0.25, 0.0, 0.0],
        &TrigPolynomial::one(),
        grid(),
        &opts,
    )
    .unwrap();
    assert_eq!(report.bound_value, report.recompute_bound());
    assert!(report
        .terms
        .iter()
        .any(|t| t.role == TermRole::Summand));
    assert_eq!(report.probability_level, 1.0);
    // entropy dominance corollary recorded in the info terms
    let h_noisy = report
        .terms
        .iter()
        .find(|t| t.name == "H_maxent_noisy")
        .unwrap()
        .value;
    let h_estimate = report
        .terms
        .iter()
        .find(|t| t.name == "H_estimate_noisy")
        .unwrap()
        .value;
    assert!(h_noisy >= h_estimate - 1e-8);

    let model = ProcessModel::Ar {
        coeffs: vec![0.5],
        innovation_variance: 1.0,
    };
    let box_ = LagBox::around(clean.lags(), 0.05).unwrap();
    let assessment = assess_box_marginal(&model, &box_, 10_000, grid()).unwrap();
    let fs = finite_sample_tv_upper_bound(&box_, &clean, grid(), &opts, &assessment).unwrap();
    assert_eq!(fs.bound_value, fs.recompute_bound());
    assert_eq!(fs.probability_level, assessment.product().clamp(0.0, 1.0));

    let truth = model.spectral_density(grid()).unwrap();
    let kl = kl_lower_bound(&truth, &box_, 2, Some(&assessment)).unwrap();
    assert_eq!(kl.bound_value, kl.recompute_bound());
}

#[test]
fn finite_sample_bound_monotone_in_box_width() {
    let opts = SolverOptions::default();
    let model = ProcessModel::Ar {
        coeffs: vec![0.5],
        innovation_variance: 1.0,
    };
    let lags = common::ar1_lags(0.5, 1.0, 2);
    let clean = CovarianceSequence::new(lags.clone()).unwrap();
    let mut previous = f64::NEG_INFINITY;
    for delta in [0.025, 0.05, 0.1] {
        let box_ = LagBox::around(&lags, delta).unwrap();
        let assessment = assess_box_marginal(&model, &box_, 10_000, grid()).unwrap();
        let report =
            finite_sample_tv_upper_bound(&box_, &clean, grid(), &opts, &assessment).unwrap();
        assert!(
            report.bound_value >= previous - 1e-9,
            "bound shrank at delta {delta}: {} < {previous}",
            report.bound_value
        );
        previous = report.bound_value;
    }
}

#[test]
fn flat_clean_finite_sample_bound_behaviour() {
    // clean = (1, 0): H[maxent_clean] = 0, so the first and third terms are
    // tv_from_kl(H[box]) and 0; bound grows with the box
    let opts = SolverOptions::default();
    let lags = vec![1.0, 0.0];
    let clean = CovarianceSequence::new(lags.clone()).unwrap();
    let model = ProcessModel::WhiteGaussian { variance: 1.0 };
    let mut previous = -1.0;
    for delta in [0.02, 0.05, 0.1] {
        let box_ = LagBox::around(&lags, delta).unwrap();
        let assessment = assess_box_marginal(&model, &box_, 5_000, grid()).unwrap();
        let report =
            finite_sample_tv_upper_bound(&box_, &clean, grid(), &opts, &assessment).unwrap();
        assert!(report.bound_value >= 0.0);
        assert!(report.bound_value >= previous - 1e-9);
        previous = report.bound_value;
        let t3 = report
            .terms
            .iter()
            .find(|t| t.name == "clean_entropy_tv")
            .unwrap()
            .value;
        assert!(t3.abs() < 1e-6);
    }
}

/// Monte Carlo ordering for the noise bound on a short run (the acceptance
/// suite runs the full 500-trial scenario).
#[test]
fn noise_bound_dominates_sampled_estimates() {
    let model = ProcessModel::Ar {
        coeffs: vec![0.5],
        innovation_variance: 1.0,
    };
    let report = run_noise_scenario(
        &model,
        0.25,
        2,
        1 << 17,
        100,
        &None,
        AngularGrid::new(1024).unwrap(),
        &SolverOptions::default(),
        21,
        0.01,
    )
    .unwrap();
    assert!(
        report.passed,
        "violations {} / {}",
        report.violations, report.trials
    );
}
