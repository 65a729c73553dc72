//! Repeated Turlach draws with λ tuned to a fixed number of selected
//! variables, for both SGL and the LASSO baseline.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::select;
use crate::datagen::SyntheticSpec;
use crate::dataset::Dataset;
use crate::error::{invalid, Result};
use crate::lasso::{LassoConfig, LassoProblem};
use crate::numerics::{Bandwidth, KernelSpec, WeightSpec};
use crate::regression::{RegressionConfig, RegressionProblem};

pub const THREADS_ENV: &str = "SGL_THREADS";

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub repeats: usize,
    /// Repeat `r` draws its data with seed `seed + r`.
    pub seed: u64,
    pub target: usize,
    pub sgl: RegressionConfig<f64>,
    pub lasso: LassoConfig<f64>,
    /// Shift every variable to zero mean before the SGL fit. The `1 + xᵀu`
    /// kernel is not translation invariant; centring keeps the intercept
    /// part of each gradient function from dominating its norm.
    pub center: bool,
}

impl BenchmarkConfig {
    /// 10-nearest-neighbour truncated Gaussian weights with the median-half
    /// bandwidth, kernel `1 + xᵀu`, five selected variables.
    pub fn standard(repeats: usize, seed: u64) -> Self {
        Self {
            repeats,
            seed,
            target: 5,
            sgl: RegressionConfig {
                weights: WeightSpec::knn(10, Bandwidth::MedianHalf),
                kernel: KernelSpec::linear_plus_one(),
                ..RegressionConfig::new(0.0)
            },
            lasso: LassoConfig::cardinality(5),
            center: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepeatOutcome {
    pub repeat: usize,
    pub seed: u64,
    pub sgl_selected: Vec<usize>,
    pub sgl_lambda: f64,
    pub sgl_exact: bool,
    pub sgl_converged: bool,
    pub lasso_selected: Vec<usize>,
    pub lasso_lambda: f64,
    pub lasso_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkResult {
    pub repeats: usize,
    pub target: usize,
    /// Selection count per variable, zero-based index.
    pub sgl_frequency: Vec<usize>,
    pub lasso_frequency: Vec<usize>,
    pub outcomes: Vec<RepeatOutcome>,
}

/// Thread cap from `SGL_THREADS`; unset or unparsable means no cap.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&t| t > 0)
}

fn one_repeat(cfg: &BenchmarkConfig, repeat: usize) -> Result<RepeatOutcome> {
    let seed = cfg.seed.wrapping_add(repeat as u64);
    let data: Dataset<f64> = SyntheticSpec::turlach(seed).generate()?;
    let sgl_data = if cfg.center {
        data.centered()
    } else {
        data.clone()
    };
    let prob = RegressionProblem::new(&sgl_data, &cfg.sgl)?;
    let fit = prob.fit_with_cardinality(&cfg.sgl, cfg.target)?;
    let lasso = LassoProblem::new(&data)?.solve_cardinality(
        cfg.target,
        cfg.lasso.tol,
        cfg.lasso.max_sweeps,
    )?;
    Ok(RepeatOutcome {
        repeat,
        seed,
        sgl_selected: select(fit.coefficients.view()).selected,
        sgl_lambda: fit.lambda,
        sgl_exact: fit.exact,
        sgl_converged: fit.report.converged,
        lasso_selected: lasso.support(),
        lasso_lambda: lasso.lambda,
        lasso_exact: lasso.exact,
    })
}

/// Runs the repeats, in parallel when more than one thread is available.
/// Results are ordered by repeat index regardless of scheduling.
pub fn selection_benchmark(
    cfg: &BenchmarkConfig,
    threads: Option<usize>,
) -> Result<BenchmarkResult> {
    if cfg.repeats == 0 {
        return invalid("repeats must be at least 1");
    }
    let run = || -> Result<Vec<RepeatOutcome>> {
        (0..cfg.repeats)
            .into_par_iter()
            .map(|r| one_repeat(cfg, r))
            .collect()
    };
    let outcomes = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| crate::error::SglError::InvalidInput(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let p = SyntheticSpec::turlach(0).p;
    let mut sgl_frequency = vec![0; p];
    let mut lasso_frequency = vec![0; p];
    for o in &outcomes {
        o.sgl_selected.iter().for_each(|&j| sgl_frequency[j] += 1);
        o.lasso_selected
            .iter()
            .for_each(|&j| lasso_frequency[j] += 1);
    }
    Ok(BenchmarkResult {
        repeats: cfg.repeats,
        target: cfg.target,
        sgl_frequency,
        lasso_frequency,
        outcomes,
    })
}
