//! The five CLI commands. Each resolves its inputs from the run config plus
//! command-line overrides, writes CSV/JSON artifacts into the output
//! directory, and returns the process exit code.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bounds::{
    finite_sample_tv_upper_bound, kl_lower_bound, noise_tv_upper_bound, BoundReport,
};
use crate::cli::config::{
    AssessmentKind, BoundsConfig, MultiProblemConfig, RunConfig,
};
use crate::cli::validate::run_scenario;
use crate::covariance::CovarianceSequence;
use crate::density::GridDensity;
use crate::error::{Error, Result};
use crate::estimator::{solve_dual, EstimatorProblem};
use crate::grid::AngularGrid;
use crate::maxent::{maxent_entropy_identity_check, solve_maxent, LagBox};
use crate::multivariate::{
    multi_solve_dual, multi_solve_maxent, MultiBasis, MultiGrid, MultiGridDensity,
    MultiPolynomial, MultiSampleSeries,
};
use crate::options::SolverOptions;
use crate::poly::TrigPolynomial;
use crate::sampling::{
    assess_box_marginal, moment_interval_probability, monte_carlo_interval_probability, simulate,
    LagInterval, MomentMethod, PairDistribution, ProbabilityAssessment, SampleSeries,
};

const LAG_CONVENTION: &str =
    "r_k = (1/2pi) * integral cos(k*theta) * Phi(theta) d theta over [-pi, pi)";

/// Inputs resolved from the command line; overrides win over the config file.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub config: RunConfig,
    pub lags: Option<Vec<f64>>,
    pub input: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
}

impl Invocation {
    fn grid(&self) -> Result<AngularGrid> {
        AngularGrid::new(self.config.grid_size_or_default())
    }

    fn solver(&self) -> SolverOptions {
        self.config.solver_or_default()
    }

    fn seed(&self) -> u64 {
        self.seed.or(self.config.seed).unwrap_or(0)
    }

    fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    /// Lag window from (in priority order) --lags, the config block, or a
    /// sample CSV reduced through the lag estimator at `order`.
    fn resolve_lags(
        &self,
        config_lags: &Option<Vec<f64>>,
        config_input: &Option<PathBuf>,
    ) -> Result<Vec<f64>> {
        if let Some(lags) = &self.lags {
            return Ok(lags.clone());
        }
        if let Some(lags) = config_lags {
            return Ok(lags.clone());
        }
        let input = self
            .input
            .clone()
            .or_else(|| config_input.clone())
            .ok_or_else(|| {
                Error::Invalid("no lags given: pass --lags, config lags, or an input CSV".into())
            })?;
        let order = self.config.order.ok_or_else(|| {
            Error::Invalid("estimating lags from samples requires `order` in the config".into())
        })?;
        let series = SampleSeries::read_csv_path(&input)?;
        series.estimate_lags(order)
    }
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")?;
    Ok(())
}

fn write_density_csv(path: &Path, density: &GridDensity) -> Result<()> {
    let mut w = std::fs::File::create(path)?;
    writeln!(
        w,
        "# grid: size={} uniform nodes theta_j = -pi + j*2*pi/size on [-pi, pi)",
        density.grid().size()
    )?;
    writeln!(w, "# convention: {LAG_CONVENTION}")?;
    writeln!(w, "theta,phi")?;
    for (theta, value) in density.grid().nodes().zip(density.values()) {
        writeln!(w, "{theta},{value}")?;
    }
    Ok(())
}

fn write_multi_density_csv(path: &Path, density: &MultiGridDensity) -> Result<()> {
    let mut w = std::fs::File::create(path)?;
    let sizes: Vec<String> = density
        .grid()
        .axes()
        .iter()
        .map(|g| g.size().to_string())
        .collect();
    writeln!(
        w,
        "# grid: product of uniform axes (sizes {}) on [-pi, pi)^d",
        sizes.join("x")
    )?;
    writeln!(w, "# convention: {LAG_CONVENTION} per axis (product basis)")?;
    match density.grid().dimension() {
        1 => {
            writeln!(w, "theta1,phi")?;
            for (j, value) in density.values().iter().enumerate() {
                let idx = density.grid().unflatten(j);
                writeln!(w, "{},{value}", density.grid().axes()[0].node(idx[0]))?;
            }
        }
        _ => {
            writeln!(w, "theta1,theta2,phi")?;
            for (j, value) in density.values().iter().enumerate() {
                let idx = density.grid().unflatten(j);
                writeln!(
                    w,
                    "{},{},{value}",
                    density.grid().axes()[0].node(idx[0]),
                    density.grid().axes()[1].node(idx[1])
                )?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct EstimateSummary<'a> {
    schema: &'a str,
    grid_size: usize,
    lags: &'a [f64],
    prior: &'a [f64],
    denominator: &'a [f64],
    iterations: usize,
    gradient_norm: f64,
    moment_residual: f64,
    convention: &'a str,
}

#[derive(Serialize)]
struct MultiEstimateSummary<'a> {
    schema: &'a str,
    axis_grids: Vec<usize>,
    basis: &'a [Vec<u32>],
    moments: &'a [f64],
    prior: &'a [f64],
    denominator: &'a [f64],
    iterations: usize,
    moment_residual: f64,
    convention: &'a str,
}

fn multi_setup(
    multi: &MultiProblemConfig,
    input_override: &Option<PathBuf>,
) -> Result<(MultiBasis, MultiGrid, Vec<f64>)> {
    let dimension = multi
        .basis
        .first()
        .map(|e| e.len())
        .ok_or_else(|| Error::Invalid("multivariate basis is empty".into()))?;
    let basis = MultiBasis::new(dimension, multi.basis.clone())?;
    let axis = AngularGrid::new(multi.axis_grid.unwrap_or(128))?;
    let grid = MultiGrid::new(vec![axis; dimension])?;
    let moments = if let Some(m) = &multi.moments {
        m.clone()
    } else {
        let input = input_override
            .clone()
            .or_else(|| multi.input.clone())
            .ok_or_else(|| {
                Error::Invalid("multivariate problem needs moments or an input CSV".into())
            })?;
        let series = MultiSampleSeries::read_csv_path(&input)?;
        series.estimate_moments(&basis)?
    };
    Ok((basis, grid, moments))
}

pub fn cmd_estimate(inv: &Invocation) -> Result<i32> {
    ensure_out_dir(&inv.out_dir)?;
    let opts = inv.solver();
    let estimate_cfg = inv.config.estimate.clone().unwrap_or_default();

    if let Some(multi) = &estimate_cfg.multivariate {
        let (basis, grid, moments) = multi_setup(multi, &inv.input)?;
        let prior = match &multi.prior {
            Some(c) => MultiPolynomial::new(basis.clone(), c.clone())?,
            None => MultiPolynomial::constant(basis.clone(), 1.0)?,
        };
        let solution = multi_solve_dual(&moments, &prior, &grid, &opts)?;
        write_multi_density_csv(&inv.out_path("density.csv"), &solution.density(&grid)?)?;
        write_json(
            &inv.out_path("estimate.json"),
            &MultiEstimateSummary {
                schema: "specbound-estimate/1",
                axis_grids: grid.axes().iter().map(|g| g.size()).collect(),
                basis: basis.exponents(),
                moments: &moments,
                prior: prior.coeffs(),
                denominator: solution.denominator().coeffs(),
                iterations: solution.iterations(),
                moment_residual: solution.moment_residual(),
                convention: LAG_CONVENTION,
            },
        )?;
        return Ok(0);
    }

    let grid = inv.grid()?;
    let lags = inv.resolve_lags(&estimate_cfg.lags, &estimate_cfg.input)?;
    let window = CovarianceSequence::new(lags)?;
    let prior = match &estimate_cfg.prior {
        Some(c) => TrigPolynomial::new(c.clone())?,
        None => TrigPolynomial::one(),
    };
    let problem = EstimatorProblem::new(window, prior, grid)?;
    let solution = solve_dual(&problem, &opts)?;
    write_density_csv(&inv.out_path("density.csv"), &solution.density(grid)?)?;
    write_json(
        &inv.out_path("estimate.json"),
        &EstimateSummary {
            schema: "specbound-estimate/1",
            grid_size: grid.size(),
            lags: problem.lags().lags(),
            prior: problem.prior().coeffs(),
            denominator: solution.denominator().coeffs(),
            iterations: solution.iterations(),
            gradient_norm: solution.gradient_norm(),
            moment_residual: solution.moment_residual(),
            convention: LAG_CONVENTION,
        },
    )?;
    Ok(0)
}

#[derive(Serialize)]
struct MaxentSummary<'a> {
    schema: &'a str,
    grid_size: usize,
    lags: &'a [f64],
    lambdas: &'a [f64],
    iterations: usize,
    gradient_norm: f64,
    moment_residual: f64,
    entropy_quadrature: f64,
    entropy_closed_form: f64,
    convention: &'a str,
}

#[derive(Serialize)]
struct MultiMaxentSummary<'a> {
    schema: &'a str,
    axis_grids: Vec<usize>,
    basis: &'a [Vec<u32>],
    moments: &'a [f64],
    lambdas: &'a [f64],
    iterations: usize,
    moment_residual: f64,
    entropy_quadrature: f64,
    entropy_closed_form: f64,
    convention: &'a str,
}

pub fn cmd_maxent(inv: &Invocation) -> Result<i32> {
    ensure_out_dir(&inv.out_dir)?;
    let opts = inv.solver();
    let maxent_cfg = inv.config.maxent.clone().unwrap_or_default();

    if let Some(multi) = &maxent_cfg.multivariate {
        let (basis, grid, moments) = multi_setup(multi, &inv.input)?;
        let solution = multi_solve_maxent(&moments, &basis, &grid, &opts)?;
        let density = solution.density(&grid)?;
        write_multi_density_csv(&inv.out_path("density.csv"), &density)?;
        write_json(
            &inv.out_path("maxent.json"),
            &MultiMaxentSummary {
                schema: "specbound-maxent/1",
                axis_grids: grid.axes().iter().map(|g| g.size()).collect(),
                basis: basis.exponents(),
                moments: &moments,
                lambdas: solution.lambdas(),
                iterations: solution.iterations(),
                moment_residual: solution.moment_residual(),
                entropy_quadrature: density.entropy(),
                entropy_closed_form: solution.entropy_closed_form(&moments),
                convention: LAG_CONVENTION,
            },
        )?;
        return Ok(0);
    }

    let grid = inv.grid()?;
    let lags = inv.resolve_lags(&maxent_cfg.lags, &maxent_cfg.input)?;
    let window = CovarianceSequence::new(lags)?;
    let solution = solve_maxent(&window, grid, &opts)?;
    let (entropy_quadrature, entropy_closed_form) =
        maxent_entropy_identity_check(&solution, &window, grid);
    write_density_csv(&inv.out_path("density.csv"), &solution.density(grid))?;
    write_json(
        &inv.out_path("maxent.json"),
        &MaxentSummary {
            schema: "specbound-maxent/1",
            grid_size: grid.size(),
            lags: window.lags(),
            lambdas: solution.lambdas(),
            iterations: solution.iterations(),
            gradient_norm: solution.gradient_norm(),
            moment_residual: solution.moment_residual(),
            entropy_quadrature,
            entropy_closed_form,
            convention: LAG_CONVENTION,
        },
    )?;
    Ok(0)
}

/// Second moment of the Gaussian pair product y_t·y_{t+k} by Isserlis:
/// E[X²Y²] = v² + 2c².
fn gaussian_pair_moments(variance: f64, covariance: f64) -> [f64; 2] {
    [covariance, variance * variance + 2.0 * covariance * covariance]
}

fn build_assessment(
    kind: AssessmentKind,
    model: &crate::sampling::ProcessModel,
    box_: &LagBox,
    n_samples: usize,
    trials: Option<usize>,
    grid: AngularGrid,
    seed: u64,
) -> Result<ProbabilityAssessment> {
    match kind {
        AssessmentKind::Marginal => assess_box_marginal(model, box_, n_samples, grid),
        AssessmentKind::MonteCarlo => monte_carlo_interval_probability(
            model,
            box_,
            box_.order(),
            n_samples,
            trials.unwrap_or(1000),
            seed,
        ),
        AssessmentKind::Cantelli | AssessmentKind::Markov => {
            let method = if kind == AssessmentKind::Cantelli {
                MomentMethod::Cantelli
            } else {
                MomentMethod::Markov
            };
            let order = box_.order();
            let per_lag = (0..=order)
                .map(|k| {
                    let pair = PairDistribution::from_model(model, k, grid)?;
                    let PairDistribution::GaussianProduct {
                        variance,
                        covariance,
                    } = pair
                    else {
                        return Err(Error::UnknownDistribution("non-Gaussian model".into()));
                    };
                    let moments = gaussian_pair_moments(variance, covariance);
                    let p = moment_interval_probability(
                        &moments,
                        box_.lower()[k],
                        box_.upper()[k],
                        n_samples,
                        k,
                        method,
                    )?;
                    Ok(LagInterval {
                        lower: box_.lower()[k],
                        upper: box_.upper()[k],
                        probability: p,
                        method: method.assessment_method(),
                        wilson95: None,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ProbabilityAssessment::from_per_lag(per_lag))
        }
    }
}

pub fn cmd_bounds(inv: &Invocation) -> Result<i32> {
    ensure_out_dir(&inv.out_dir)?;
    let grid = inv.grid()?;
    let opts = inv.solver();
    let config = inv
        .config
        .bounds
        .clone()
        .ok_or_else(|| Error::Invalid("bounds command needs a `bounds` config block".into()))?;

    let report: BoundReport = match &config {
        BoundsConfig::Noise {
            clean_lags,
            noise_lags,
            prior,
        } => {
            let clean = CovarianceSequence::new(clean_lags.clone())?;
            let prior = match prior {
                Some(c) => TrigPolynomial::new(c.clone())?,
                None => TrigPolynomial::one(),
            };
            noise_tv_upper_bound(&clean, noise_lags, &prior, grid, &opts)?
        }
        BoundsConfig::FiniteSample {
            clean_lags,
            delta,
            n_samples,
            model,
            assessment,
            trials,
        } => {
            let clean = CovarianceSequence::new(clean_lags.clone())?;
            let box_ = LagBox::around(clean_lags, *delta)?;
            let prob = build_assessment(
                *assessment,
                model,
                &box_,
                *n_samples,
                *trials,
                grid,
                inv.seed(),
            )?;
            finite_sample_tv_upper_bound(&box_, &clean, grid, &opts, &prob)?
        }
        BoundsConfig::KlLower {
            model,
            order,
            delta,
            n_samples,
        } => {
            let true_density = model.spectral_density(grid)?;
            let lags = true_density.raw_lags(*order)?;
            let box_ = LagBox::around(&lags, *delta)?;
            let assessment = match n_samples {
                Some(n) => Some(assess_box_marginal(model, &box_, *n, grid)?),
                None => None,
            };
            kl_lower_bound(&true_density, &box_, *order, assessment.as_ref())?
        }
    };
    write_json(&inv.out_path("bound_report.json"), &report)?;
    Ok(0)
}

pub fn cmd_simulate(inv: &Invocation) -> Result<i32> {
    ensure_out_dir(&inv.out_dir)?;
    let config = inv
        .config
        .simulate
        .clone()
        .ok_or_else(|| Error::Invalid("simulate command needs a `simulate` config block".into()))?;
    let series = simulate(&config.model, config.length, inv.seed())?;
    series.write_csv_path(&inv.out_path("series.csv"))?;
    Ok(0)
}

pub fn cmd_validate(inv: &Invocation) -> Result<i32> {
    ensure_out_dir(&inv.out_dir)?;
    let grid = inv.grid()?;
    let opts = inv.solver();
    let config = inv
        .config
        .validate
        .clone()
        .ok_or_else(|| Error::Invalid("validate command needs a `validate` config block".into()))?;
    let report = run_scenario(&config.scenario, grid, &opts, inv.seed(), config.allowance)?;
    write_json(&inv.out_path("validation.json"), &report)?;
    if report.passed {
        Ok(0)
    } else {
        Ok(4)
    }
}
