//! Sparse gradient learning for regression.
//!
//! The coefficient matrix `C̃ = C·K^{1/2}` (`p × n`) parameterizes the
//! partial-derivative functions; row `j` has Euclidean norm `‖f^j‖_K`. The
//! objective
//!
//! ```text
//! Ψ(C̃) = 1/n² Σ_ij ω_ij (y_i - y_j + (x_j - x_i)ᵀ C̃ k_i^{1/2})² + λ Σ_j ‖c̃^j‖₂
//! ```
//!
//! is minimized by forward-backward splitting: a gradient step on the
//! quadratic part followed by row-wise group soft-thresholding.

use std::sync::OnceLock;

use ndarray::{Array1, Array2, ArrayView2};
use serde::Serialize;

use crate::analysis::{select, SelectionResult};
use crate::dataset::{Dataset, Task};
use crate::error::{invalid, Result, SglError};
use crate::numerics::{lipschitz_estimate, Bandwidth, KernelSpec, WeightSpec};
use crate::problem::{Precomputed, Reduction};
use crate::prox::{frobenius_diff, group_norm, prox_group_inplace};
use crate::scalar::Float;

/// Objective growth factor (relative to the starting value) treated as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize<F> {
    /// `1/L` with `L` the estimated Lipschitz constant of the smooth gradient.
    Auto,
    /// Must lie in `(0, 2/L)`.
    Fixed(F),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionConfig<F> {
    pub lambda: F,
    pub step: StepSize<F>,
    pub tol: F,
    pub max_iter: usize,
    pub weights: WeightSpec<F>,
    pub kernel: KernelSpec<F>,
    pub reduction: Reduction,
}

impl<F: Float> RegressionConfig<F> {
    /// Gaussian all-pairs weights and a `1 + xᵀu` kernel, bandwidths from the
    /// median pairwise distance.
    pub fn new(lambda: F) -> Self {
        Self {
            lambda,
            step: StepSize::Auto,
            tol: F::lit(1e-6),
            max_iter: 10_000,
            weights: WeightSpec::gaussian(Bandwidth::MedianHalf),
            kernel: KernelSpec::linear_plus_one(),
            reduction: Reduction::Auto,
        }
    }

    pub fn with_lambda(&self, lambda: F) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }
}

/// Transformed representer coefficients `C̃`, variables in rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientMatrix<F>(pub Array2<F>);

impl<F: Float> CoefficientMatrix<F> {
    pub fn zeros(p: usize, n: usize) -> Self {
        Self(Array2::zeros((p, n)))
    }

    pub fn view(&self) -> ArrayView2<'_, F> {
        self.0.view()
    }

    pub fn n_vars(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == F::zero())
    }

    pub fn into_inner(self) -> Array2<F> {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport<F> {
    pub iterations: usize,
    pub final_objective: F,
    /// Objective at the starting point followed by one entry per iteration.
    pub objective_trace: Vec<F>,
    /// `‖C̃* - prox(C̃* - δ∇Ψ₂(C̃*))‖_F` at the returned solution.
    pub fixed_point_residual: F,
    pub converged: bool,
    pub step: F,
}

/// Regression data with the kernel, weights and factorizations precomputed.
#[derive(Debug)]
pub struct RegressionProblem<F> {
    pre: Precomputed<F>,
    y: Array1<F>,
    lipschitz: OnceLock<F>,
}

impl<F: Float> RegressionProblem<F> {
    pub fn new(data: &Dataset<F>, cfg: &RegressionConfig<F>) -> Result<Self> {
        if data.task() != Task::Regression {
            return invalid("regression solver needs a regression dataset");
        }
        let pre = Precomputed::build(data, &cfg.kernel, &cfg.weights, cfg.reduction)?;
        Ok(Self::from_precomputed(pre, data.y().to_owned()))
    }

    pub fn from_precomputed(pre: Precomputed<F>, y: Array1<F>) -> Self {
        assert_eq!(pre.n(), y.len(), "response length must match sample count");
        Self {
            pre,
            y,
            lipschitz: OnceLock::new(),
        }
    }

    pub fn precomputed(&self) -> &Precomputed<F> {
        &self.pre
    }

    pub fn n(&self) -> usize {
        self.pre.n()
    }

    pub fn p(&self) -> usize {
        self.pre.p()
    }

    fn scale(&self) -> F {
        let n = F::from_usize_lossy(self.n());
        F::one() / (n * n)
    }

    /// `r_ij = y_i - y_j + (x_j - x_i)ᵀ C̃ k_i^{1/2}` over the weighted pairs.
    pub fn residuals(&self, c: ArrayView2<F>) -> Result<Vec<F>> {
        self.pre.check_coefficients(c)?;
        Ok(self.residuals_unchecked(c))
    }

    fn residuals_unchecked(&self, c: ArrayView2<F>) -> Vec<F> {
        let proj = self.pre.pair_projections(c);
        self.pre
            .pairs()
            .iter()
            .zip(proj)
            .map(|(pr, t)| self.y[pr.i] - self.y[pr.j] + t)
            .collect()
    }

    fn smooth_from_residuals(&self, r: &[F]) -> F {
        let mut acc = F::zero();
        for (pr, &ri) in self.pre.pairs().iter().zip(r) {
            acc += pr.w * ri * ri;
        }
        acc * self.scale()
    }

    fn grad_from_residuals(&self, r: &[F]) -> Array2<F> {
        let two_scale = F::lit(2.0) * self.scale();
        let q: Vec<F> = self
            .pre
            .pairs()
            .iter()
            .zip(r)
            .map(|(pr, &ri)| two_scale * pr.w * ri)
            .collect();
        self.pre.pair_adjoint(&q)
    }

    /// Quadratic data term `Ψ₂`.
    pub fn smooth_objective(&self, c: ArrayView2<F>) -> Result<F> {
        Ok(self.smooth_from_residuals(&self.residuals(c)?))
    }

    /// Full objective `Ψ₂(C̃) + λ Σ_j ‖c̃^j‖₂`.
    pub fn objective(&self, c: ArrayView2<F>, lambda: F) -> Result<F> {
        Ok(self.smooth_objective(c)? + lambda * group_norm(c))
    }

    /// `∇Ψ₂(C̃) = 2/n² Σ_ij ω_ij r_ij (x_j - x_i)(k_i^{1/2})ᵀ`.
    pub fn grad_smooth(&self, c: ArrayView2<F>) -> Result<Array2<F>> {
        Ok(self.grad_from_residuals(&self.residuals(c)?))
    }

    /// Hessian of `Ψ₂` applied to `c`, i.e. `∇Ψ₂(c) - ∇Ψ₂(0)`.
    pub fn hessian_apply(&self, c: ArrayView2<F>) -> Array2<F> {
        let proj = self.pre.pair_projections(c);
        let two_scale = F::lit(2.0) * self.scale();
        let q: Vec<F> = self
            .pre
            .pairs()
            .iter()
            .zip(proj)
            .map(|(pr, t)| two_scale * pr.w * t)
            .collect();
        self.pre.pair_adjoint(&q)
    }

    /// Smallest `λ` for which `C̃ = 0` is optimal: the largest row norm of `∇Ψ₂(0)`.
    pub fn lambda_max(&self) -> F {
        let g = self.grad_from_residuals(
            &self.residuals_unchecked(Array2::zeros((self.p(), self.n())).view()),
        );
        crate::prox::row_norms(g.view())
            .iter()
            .fold(F::zero(), |a, &b| a.max(b))
    }

    /// Power-iteration estimate of `‖∇²Ψ₂‖`, cached after the first call.
    pub fn lipschitz(&self) -> Result<F> {
        if let Some(&l) = self.lipschitz.get() {
            return Ok(l);
        }
        let (p, n) = (self.p(), self.n());
        let l = lipschitz_estimate(p * n, |v: &Array1<F>| {
            let c = v.view().into_shape_with_order((p, n)).expect("p*n vector");
            let h = self.hessian_apply(c);
            Array1::from_iter(h.iter().copied())
        })?;
        Ok(*self.lipschitz.get_or_init(|| l))
    }

    pub fn resolve_step(&self, step: StepSize<F>) -> Result<F> {
        let l = self.lipschitz()?;
        match step {
            StepSize::Auto => Ok(F::one() / l),
            StepSize::Fixed(d) => {
                if d > F::zero() && d < F::lit(2.0) / l {
                    Ok(d)
                } else {
                    Err(SglError::StepSize(format!(
                        "step {d} outside (0, 2/L) with L = {l}"
                    )))
                }
            }
        }
    }

    /// One iteration: `prox_{λδ}(C̃ - δ∇Ψ₂(C̃))`.
    pub fn forward_backward_step(
        &self,
        c: ArrayView2<F>,
        lambda: F,
        delta: F,
    ) -> Result<Array2<F>> {
        let g = self.grad_smooth(c)?;
        let mut d = c.to_owned();
        d.scaled_add(-delta, &g);
        prox_group_inplace(&mut d, lambda * delta);
        Ok(d)
    }

    pub fn fit(&self, cfg: &RegressionConfig<F>) -> Result<(CoefficientMatrix<F>, FitReport<F>)> {
        self.fit_from(Array2::zeros((self.p(), self.n())), cfg)
    }

    /// Runs forward-backward splitting from `init` until the relative
    /// Frobenius change drops to `cfg.tol` or `cfg.max_iter` is reached.
    pub fn fit_from(
        &self,
        init: Array2<F>,
        cfg: &RegressionConfig<F>,
    ) -> Result<(CoefficientMatrix<F>, FitReport<F>)> {
        self.pre.check_coefficients(init.view())?;
        if !(cfg.lambda >= F::zero()) {
            return invalid(format!("lambda must be nonnegative, got {}", cfg.lambda));
        }
        if !(cfg.tol > F::zero()) || cfg.max_iter == 0 {
            return invalid("tol must be positive and max_iter at least 1");
        }
        let delta = self.resolve_step(cfg.step)?;
        let threshold = cfg.lambda * delta;

        let mut c = init;
        let mut r = self.residuals_unchecked(c.view());
        let obj0 = self.smooth_from_residuals(&r) + cfg.lambda * group_norm(c.view());
        let blowup = F::lit(DIVERGENCE_FACTOR) * obj0.abs().max(F::lit(1e-12));
        let mut trace = vec![obj0];
        let mut converged = false;
        let mut iterations = 0;

        while iterations < cfg.max_iter {
            iterations += 1;
            let g = self.grad_from_residuals(&r);
            let mut next = c.clone();
            next.scaled_add(-delta, &g);
            prox_group_inplace(&mut next, threshold);

            r = self.residuals_unchecked(next.view());
            let obj = self.smooth_from_residuals(&r) + cfg.lambda * group_norm(next.view());
            if !obj.is_finite() || obj > blowup {
                return Err(SglError::StepSize(format!(
                    "objective diverged to {obj} at iteration {iterations}; use a smaller step"
                )));
            }
            trace.push(obj);

            let change = frobenius_diff(next.view(), c.view());
            let scale = crate::numerics::linalg::frobenius(c.view()).max(F::one());
            c = next;
            if change <= cfg.tol * scale {
                converged = true;
                break;
            }
        }

        let fixed_point_residual = {
            let g = self.grad_from_residuals(&r);
            let mut d = c.clone();
            d.scaled_add(-delta, &g);
            prox_group_inplace(&mut d, threshold);
            frobenius_diff(d.view(), c.view())
        };
        let report = FitReport {
            iterations,
            final_objective: *trace.last().expect("trace has the start value"),
            objective_trace: trace,
            fixed_point_residual,
            converged,
            step: delta,
        };
        Ok((CoefficientMatrix(c), report))
    }

    /// Walks a strictly descending `λ` grid with warm starts. `None` uses 50
    /// log-spaced values from `λ_max` down to `1e-3·λ_max`.
    pub fn regularization_path(
        &self,
        cfg: &RegressionConfig<F>,
        grid: Option<&[F]>,
    ) -> Result<Vec<PathPoint<F>>> {
        let grid = match grid {
            Some(g) => {
                if g.is_empty() {
                    return invalid("lambda grid is empty");
                }
                if g.windows(2).any(|w| !(w[0] > w[1])) {
                    return invalid("lambda grid must be strictly descending");
                }
                g.to_vec()
            }
            None => log_grid(self.lambda_max(), F::lit(1e-3), 50),
        };
        let mut warm = Array2::zeros((self.p(), self.n()));
        let mut out = Vec::with_capacity(grid.len());
        for &lambda in &grid {
            let (c, report) = self.fit_from(warm, &cfg.with_lambda(lambda))?;
            warm = c.0.clone();
            out.push(PathPoint {
                lambda,
                selection: select(c.view()),
                coefficients: c,
                report,
            });
        }
        Ok(out)
    }

    /// Searches `λ` so that exactly `target` variables are selected:
    /// geometric descent from `λ_max` to bracket the target, then log-scale
    /// bisection, warm-starting every fit. If the target is never hit, the
    /// closest count is returned, preferring fewer variables.
    pub fn fit_with_cardinality(
        &self,
        cfg: &RegressionConfig<F>,
        target: usize,
    ) -> Result<CardinalityFit<F>> {
        if target > self.p() {
            return invalid(format!(
                "target cardinality {target} exceeds p = {}",
                self.p()
            ));
        }
        let lmax = self.lambda_max();
        let mut best: Option<CardinalityFit<F>> = None;
        let mut consider = |lambda: F, c: &CoefficientMatrix<F>, report: &FitReport<F>| -> bool {
            let count = select(c.view()).selected.len();
            let cand = CardinalityFit {
                lambda,
                coefficients: c.clone(),
                report: report.clone(),
                selected: count,
                exact: count == target,
            };
            let better = match &best {
                None => true,
                Some(b) => {
                    let (db, dc) = (b.selected.abs_diff(target), count.abs_diff(target));
                    dc < db || (dc == db && count < b.selected)
                }
            };
            if better {
                best = Some(cand);
            }
            count == target
        };

        let (c0, r0) = self.fit(&cfg.with_lambda(lmax))?;
        if consider(lmax, &c0, &r0) || lmax == F::zero() {
            return Ok(best.expect("candidate recorded"));
        }
        let shrink = F::lit(0.7);
        let (mut hi, mut hi_c) = (lmax, c0.0);
        let mut lo: Option<(F, Array2<F>)> = None;
        let mut lambda = lmax;
        for _ in 0..80 {
            lambda *= shrink;
            let (c, rep) = self.fit_from(hi_c.clone(), &cfg.with_lambda(lambda))?;
            let count = select(c.view()).selected.len();
            if consider(lambda, &c, &rep) {
                return Ok(best.expect("candidate recorded"));
            }
            if count > target {
                lo = Some((lambda, c.0));
                break;
            }
            hi = lambda;
            hi_c = c.0;
        }
        if let Some((mut lo_l, _)) = lo {
            for _ in 0..100 {
                let mid = (lo_l * hi).sqrt();
                if !(mid < hi && mid > lo_l) {
                    break;
                }
                let (c, rep) = self.fit_from(hi_c.clone(), &cfg.with_lambda(mid))?;
                let count = select(c.view()).selected.len();
                if consider(mid, &c, &rep) {
                    break;
                }
                if count > target {
                    lo_l = mid;
                } else {
                    hi = mid;
                    hi_c = c.0;
                }
            }
        }
        Ok(best.expect("candidate recorded"))
    }
}

#[derive(Debug, Clone)]
pub struct PathPoint<F> {
    pub lambda: F,
    pub selection: SelectionResult<F>,
    pub coefficients: CoefficientMatrix<F>,
    pub report: FitReport<F>,
}

#[derive(Debug, Clone)]
pub struct CardinalityFit<F> {
    pub lambda: F,
    pub coefficients: CoefficientMatrix<F>,
    pub report: FitReport<F>,
    pub selected: usize,
    /// False when the search settled for the nearest achievable count.
    pub exact: bool,
}

/// `count` log-spaced values from `top` down to `top·ratio`, inclusive.
pub fn log_grid<F: Float>(top: F, ratio: F, count: usize) -> Vec<F> {
    if count <= 1 || top == F::zero() {
        return vec![top];
    }
    let steps = F::from_usize_lossy(count - 1);
    (0..count)
        .map(|k| top * ratio.powf(F::from_usize_lossy(k) / steps))
        .collect()
}

/// `C = C̃ · K^{-1/2}` (pseudo-inverse when `K` is singular).
pub fn recover_original_coefficients<F: Float>(
    c_tilde: ArrayView2<F>,
    k_half_pinv: ArrayView2<F>,
) -> Result<Array2<F>> {
    if c_tilde.ncols() != k_half_pinv.nrows() {
        return invalid(format!(
            "coefficients have {} columns but K^(-1/2) is {:?}",
            c_tilde.ncols(),
            k_half_pinv.dim()
        ));
    }
    Ok(c_tilde.dot(&k_half_pinv))
}

/// Builds the problem and fits it in one call.
pub fn fit<F: Float>(
    data: &Dataset<F>,
    cfg: &RegressionConfig<F>,
) -> Result<(CoefficientMatrix<F>, FitReport<F>)> {
    RegressionProblem::new(data, cfg)?.fit(cfg)
}
