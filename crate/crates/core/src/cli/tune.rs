//! Leave-one-out grid search.
//!
//! Regression has no built-in predictor, so each λ is scored by the
//! leave-one-out squared error of a 1-nearest-neighbour regressor on the
//! EDR projections of a full-data fit. This proxy is a tooling choice.
//! Classification refits the SGL classifier once per held-out sample.

use ndarray::{ArrayView1, ArrayView2};
use serde::Serialize;

use crate::analysis::{edr_directions, project, select};
use crate::classification::{loo_error, ClassificationConfig};
use crate::dataset::Dataset;
use crate::error::{invalid, Result};
use crate::regression::{RegressionConfig, RegressionProblem};

/// Mean of `(y_i - y_nn(i))²`, where `nn(i)` is the nearest other row of
/// `z` (lowest index on ties).
pub fn nn_loo_mse(z: ArrayView2<f64>, y: ArrayView1<f64>) -> f64 {
    let n = z.nrows();
    let mut total = 0.0;
    for i in 0..n {
        let mut best = (f64::INFINITY, 0usize);
        for j in (0..n).filter(|&j| j != i) {
            let d: f64 = z
                .row(i)
                .iter()
                .zip(z.row(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d < best.0 {
                best = (d, j);
            }
        }
        total += (y[i] - y[best.1]).powi(2);
    }
    total / n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionTuneRow {
    pub lambda: f64,
    pub selected: usize,
    pub dims: usize,
    pub loo_mse: f64,
    pub converged: bool,
}

/// Scores every λ of a strictly descending grid with warm starts. Ties go
/// to the larger λ.
pub fn tune_regression(
    prob: &RegressionProblem<f64>,
    y: ArrayView1<f64>,
    cfg: &RegressionConfig<f64>,
    grid: &[f64],
) -> Result<(usize, Vec<RegressionTuneRow>)> {
    if grid.is_empty() {
        return invalid("lambda grid is empty");
    }
    let path = prob.regularization_path(cfg, Some(grid))?;
    let mut rows = Vec::with_capacity(path.len());
    for pt in &path {
        let edr = edr_directions(pt.coefficients.view(), None)?;
        let z = project(prob.precomputed().x(), &edr)?;
        rows.push(RegressionTuneRow {
            lambda: pt.lambda,
            selected: pt.selection.selected.len(),
            dims: edr.dim(),
            loo_mse: nn_loo_mse(z.view(), y),
            converged: pt.report.converged,
        });
    }
    let best = argmin_first(rows.iter().map(|r| r.loo_mse));
    Ok((best, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassTuneRow {
    pub lambda1: f64,
    pub lambda2: f64,
    pub loo_errors: usize,
    pub n: usize,
    /// Variables selected by the full-data fit.
    pub selected: usize,
    pub converged: bool,
}

/// Every `(λ₁, λ₂)` pair is scored by leave-one-out misclassifications.
/// Ties go to the larger `λ₂`, then the larger `λ₁`.
pub fn tune_classification(
    data: &Dataset<f64>,
    cfg: &ClassificationConfig<f64>,
    grid1: &[f64],
    grid2: &[f64],
) -> Result<(usize, Vec<ClassTuneRow>)> {
    if grid1.is_empty() || grid2.is_empty() {
        return invalid("lambda grid is empty");
    }
    let mut rows = Vec::with_capacity(grid1.len() * grid2.len());
    for &l1 in grid1 {
        for &l2 in grid2 {
            let c = cfg.with_lambdas(l1, l2);
            let loo = loo_error(data, &c)?;
            let (model, report) = crate::classification::fit_classification(data, &c)?;
            rows.push(ClassTuneRow {
                lambda1: l1,
                lambda2: l2,
                loo_errors: loo.errors,
                n: loo.n,
                selected: select(model.c_tilde.view()).selected.len(),
                converged: report.report.converged,
            });
        }
    }
    let order = |r: &ClassTuneRow, b: &ClassTuneRow| {
        r.loo_errors
            .cmp(&b.loo_errors)
            .then(b.lambda2.total_cmp(&r.lambda2))
            .then(b.lambda1.total_cmp(&r.lambda1))
    };
    let mut best = 0;
    for k in 1..rows.len() {
        if order(&rows[k], &rows[best]).is_lt() {
            best = k;
        }
    }
    Ok((best, rows))
}

fn argmin_first(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (k, v) in values.enumerate() {
        if v < best.0 {
            best = (v, k);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn nn_loo_by_hand() {
        let z = array![[0.0], [1.0], [10.0]];
        let y = array![1.0, 2.0, 5.0];
        // 0 -> 1, 1 -> 0, 2 -> 1
        let want = (1.0 + 1.0 + 9.0) / 3.0;
        assert!((nn_loo_mse(z.view(), y.view()) - want).abs() < 1e-15);
    }

    #[test]
    fn ties_prefer_first() {
        assert_eq!(argmin_first([2.0, 1.0, 1.0].into_iter()), 1);
    }
}
