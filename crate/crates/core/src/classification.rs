//! Sparse gradient learning for binary classification.
//!
//! An intercept function `f⁰ = Σ_i α_i K(·, x_i)` and sparse gradient rows
//! `C̃` are fitted jointly under the logistic loss `φ(t) = log(1 + e^{-t})`
//! applied to first-order expansions between sample pairs:
//!
//! ```text
//! Ψ(α, C̃) = 1/n² Σ_ij ω_ij φ(y_j(αᵀk_i + (x_j - x_i)ᵀ C̃ k_i^{1/2}))
//!           + λ₁ αᵀKα + λ₂ Σ_j ‖c̃^j‖₂
//! ```
//!
//! `α` takes plain gradient steps and `C̃` takes a gradient step followed by
//! group soft-thresholding, both with one shared step size.

use std::sync::OnceLock;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{Dataset, Task};
use crate::error::{invalid, Result, SglError};
use crate::numerics::linalg::frobenius;
use crate::numerics::{rayleigh_top_eigenvalue, Bandwidth, KernelSpec, ResolvedKernel, WeightSpec};
use crate::problem::{Precomputed, Reduction};
use crate::prox::{group_norm, prox_group_inplace, row_norms};
use crate::regression::{CoefficientMatrix, FitReport, StepSize, DIVERGENCE_FACTOR};
use crate::scalar::Float;

/// Upper bound of `φ''` for the logistic loss.
const LOGISTIC_CURVATURE_CAP: f64 = 0.25;

/// `log(1 + e^{-t})` without overflow.
pub fn logistic_loss<F: Float>(t: F) -> F {
    let cut = F::lit(30.0);
    if t > cut {
        (-t).exp()
    } else if t < -cut {
        -t
    } else {
        (-t).exp().ln_1p()
    }
}

/// `φ'(t) = -1 / (1 + e^t)`.
pub fn logistic_loss_derivative<F: Float>(t: F) -> F {
    if t >= F::zero() {
        let e = (-t).exp();
        -e / (F::one() + e)
    } else {
        -F::one() / (F::one() + t.exp())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationConfig<F> {
    /// Ridge weight on `‖f⁰‖²_K`.
    pub lambda1: F,
    /// Group-sparsity weight on the gradient rows.
    pub lambda2: F,
    pub step: StepSize<F>,
    pub tol: F,
    pub max_iter: usize,
    pub weights: WeightSpec<F>,
    pub kernel: KernelSpec<F>,
    pub reduction: Reduction,
}

impl<F: Float> ClassificationConfig<F> {
    /// Gaussian weights and Gaussian kernel, both with the median-half bandwidth.
    pub fn new(lambda1: F, lambda2: F) -> Self {
        Self {
            lambda1,
            lambda2,
            step: StepSize::Auto,
            tol: F::lit(1e-6),
            max_iter: 10_000,
            weights: WeightSpec::gaussian(Bandwidth::MedianHalf),
            kernel: KernelSpec::gaussian(Bandwidth::MedianHalf),
            reduction: Reduction::Auto,
        }
    }

    pub fn with_lambdas(&self, lambda1: F, lambda2: F) -> Self {
        Self {
            lambda1,
            lambda2,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassFitReport<F> {
    #[serde(flatten)]
    pub report: FitReport<F>,
    pub alpha_residual: F,
    pub coefficient_residual: F,
}

/// Fitted classifier. Keeps the training samples for kernel evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct ClassModel<F> {
    pub alpha: Array1<F>,
    pub c_tilde: CoefficientMatrix<F>,
    pub kernel: ResolvedKernel<F>,
    pub training_x: Array2<F>,
    pub training_fingerprint: String,
}

impl<F: Float> ClassModel<F> {
    /// `f⁰(x) = Σ_i α_i K(x, x_i)`.
    pub fn decision(&self, x: ArrayView1<F>) -> Result<F> {
        if x.len() != self.training_x.ncols() {
            return invalid(format!(
                "sample has {} variables, model expects {}",
                x.len(),
                self.training_x.ncols()
            ));
        }
        Ok(self
            .training_x
            .rows()
            .into_iter()
            .zip(self.alpha.iter())
            .map(|(xi, &a)| a * self.kernel.eval(x, xi))
            .sum())
    }

    /// `+1` when the decision value is positive, `-1` otherwise (including zero).
    pub fn predict_label(&self, x: ArrayView1<F>) -> Result<F> {
        Ok(if self.decision(x)? > F::zero() {
            F::one()
        } else {
            -F::one()
        })
    }
}

#[derive(Debug)]
pub struct ClassificationProblem<F> {
    pre: Precomputed<F>,
    y: Array1<F>,
    fingerprint: String,
    /// Top eigenvalue of `1/n² Σ ω a aᵀ` over the joint variable.
    curvature: OnceLock<F>,
}

impl<F: Float> ClassificationProblem<F> {
    pub fn new(data: &Dataset<F>, cfg: &ClassificationConfig<F>) -> Result<Self> {
        if data.task() != Task::Classification {
            return invalid("classification solver needs labels in {-1, +1}");
        }
        let pre = Precomputed::build(data, &cfg.kernel, &cfg.weights, cfg.reduction)?;
        Ok(Self {
            pre,
            y: data.y().to_owned(),
            fingerprint: data.fingerprint(),
            curvature: OnceLock::new(),
        })
    }

    pub fn from_precomputed(pre: Precomputed<F>, y: Array1<F>) -> Result<Self> {
        if y.len() != pre.n() {
            return invalid("label count differs from sample count");
        }
        if y.iter().any(|&v| v != F::one() && v != -F::one()) {
            return invalid("labels must be -1 or +1");
        }
        Ok(Self {
            pre,
            y,
            fingerprint: String::new(),
            curvature: OnceLock::new(),
        })
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

    fn check(&self, alpha: ArrayView1<F>, c: ArrayView2<F>) -> Result<()> {
        if alpha.len() != self.n() {
            return invalid(format!(
                "alpha has length {}, expected {}",
                alpha.len(),
                self.n()
            ));
        }
        self.pre.check_coefficients(c)
    }

    /// `t_ij = y_j (αᵀk_i + (x_j - x_i)ᵀ C̃ k_i^{1/2})` over the weighted pairs.
    pub fn margins(&self, alpha: ArrayView1<F>, c: ArrayView2<F>) -> Result<Vec<F>> {
        self.check(alpha, c)?;
        Ok(self.margins_unchecked(alpha, c))
    }

    fn margins_unchecked(&self, alpha: ArrayView1<F>, c: ArrayView2<F>) -> Vec<F> {
        let f0 = self.pre.pair_intercepts(alpha);
        let proj = self.pre.pair_projections(c);
        self.pre
            .pairs()
            .iter()
            .zip(f0.into_iter().zip(proj))
            .map(|(pr, (a, b))| self.y[pr.j] * (a + b))
            .collect()
    }

    fn smooth_from_margins(&self, t: &[F], alpha: ArrayView1<F>, lambda1: F) -> F {
        let mut acc = F::zero();
        for (pr, &ti) in self.pre.pairs().iter().zip(t) {
            acc += pr.w * logistic_loss(ti);
        }
        let ridge = alpha.dot(&self.pre.k().dot(&alpha));
        acc * self.scale() + lambda1 * ridge
    }

    fn grads_from_margins(
        &self,
        t: &[F],
        alpha: ArrayView1<F>,
        lambda1: F,
    ) -> (Array1<F>, Array2<F>) {
        let scale = self.scale();
        let q: Vec<F> = self
            .pre
            .pairs()
            .iter()
            .zip(t)
            .map(|(pr, &ti)| scale * pr.w * logistic_loss_derivative(ti) * self.y[pr.j])
            .collect();
        let mut ga = self.pre.pair_intercept_adjoint(&q);
        let ka = self.pre.k().dot(&alpha);
        ga.scaled_add(F::lit(2.0) * lambda1, &ka);
        (ga, self.pre.pair_adjoint(&q))
    }

    /// Logistic data term plus the ridge on `f⁰`.
    pub fn smooth_objective(
        &self,
        alpha: ArrayView1<F>,
        c: ArrayView2<F>,
        lambda1: F,
    ) -> Result<F> {
        let t = self.margins(alpha, c)?;
        Ok(self.smooth_from_margins(&t, alpha, lambda1))
    }

    pub fn objective(
        &self,
        alpha: ArrayView1<F>,
        c: ArrayView2<F>,
        lambda1: F,
        lambda2: F,
    ) -> Result<F> {
        Ok(self.smooth_objective(alpha, c, lambda1)? + lambda2 * group_norm(c))
    }

    /// Gradients of the smooth part with respect to `α` and `C̃`.
    pub fn gradients(
        &self,
        alpha: ArrayView1<F>,
        c: ArrayView2<F>,
        lambda1: F,
    ) -> Result<(Array1<F>, Array2<F>)> {
        let t = self.margins(alpha, c)?;
        Ok(self.grads_from_margins(&t, alpha, lambda1))
    }

    /// Heuristic analogue of `λ_max`: the largest row norm of the `C̃`
    /// gradient at `α = 0, C̃ = 0`. Not a guarantee, since `α` keeps moving.
    pub fn lambda2_max_heuristic(&self) -> F {
        let zero_a = Array1::zeros(self.n());
        let zero_c = Array2::zeros((self.p(), self.n()));
        let t = self.margins_unchecked(zero_a.view(), zero_c.view());
        let (_, gc) = self.grads_from_margins(&t, zero_a.view(), F::zero());
        row_norms(gc.view())
            .iter()
            .fold(F::zero(), |a, &b| a.max(b))
    }

    fn curvature(&self) -> Result<F> {
        if let Some(&v) = self.curvature.get() {
            return Ok(v);
        }
        let (n, p) = (self.n(), self.p());
        let scale = self.scale();
        let top = rayleigh_top_eigenvalue(n + p * n, |z: &Array1<F>| {
            let alpha = z.slice(ndarray::s![..n]);
            let c = z
                .slice(ndarray::s![n..])
                .into_shape_with_order((p, n))
                .expect("p*n block");
            let u = {
                let f0 = self.pre.pair_intercepts(alpha);
                let proj = self.pre.pair_projections(c);
                f0.into_iter()
                    .zip(proj)
                    .map(|(a, b)| a + b)
                    .collect::<Vec<_>>()
            };
            let q: Vec<F> = self
                .pre
                .pairs()
                .iter()
                .zip(u)
                .map(|(pr, ui)| scale * pr.w * ui)
                .collect();
            let ga = self.pre.pair_intercept_adjoint(&q);
            let gc = self.pre.pair_adjoint(&q);
            ga.iter().chain(gc.iter()).copied().collect()
        })?;
        Ok(*self.curvature.get_or_init(|| top))
    }

    /// `L̂ = ¼·1.01·‖1/n² Σ ω a aᵀ‖ + 2λ₁‖K‖₂`, a bound on the Hessian norm
    /// of the smooth part.
    pub fn lipschitz(&self, lambda1: F) -> Result<F> {
        let data = self.curvature()?
            * F::lit(crate::numerics::lipschitz::LIPSCHITZ_SAFETY)
            * F::lit(LOGISTIC_CURVATURE_CAP);
        Ok(data + F::lit(2.0) * lambda1 * self.pre.k_norm())
    }

    pub fn fit(&self, cfg: &ClassificationConfig<F>) -> Result<(ClassModel<F>, ClassFitReport<F>)> {
        self.fit_from(
            Array1::zeros(self.n()),
            Array2::zeros((self.p(), self.n())),
            cfg,
        )
    }

    pub fn fit_from(
        &self,
        alpha0: Array1<F>,
        c0: Array2<F>,
        cfg: &ClassificationConfig<F>,
    ) -> Result<(ClassModel<F>, ClassFitReport<F>)> {
        self.check(alpha0.view(), c0.view())?;
        if !(cfg.lambda1 >= F::zero()) || !(cfg.lambda2 >= F::zero()) {
            return invalid("lambda1 and lambda2 must be nonnegative");
        }
        if !(cfg.tol > F::zero()) || cfg.max_iter == 0 {
            return invalid("tol must be positive and max_iter at least 1");
        }
        let l = self.lipschitz(cfg.lambda1)?;
        let delta = match cfg.step {
            StepSize::Auto => F::one() / l,
            StepSize::Fixed(d) if d > F::zero() && d < F::lit(2.0) / l => d,
            StepSize::Fixed(d) => {
                return Err(SglError::StepSize(format!(
                    "step {d} outside (0, 2/L) with L = {l}"
                )))
            }
        };
        let threshold = cfg.lambda2 * delta;

        let (mut alpha, mut c) = (alpha0, c0);
        let mut t = self.margins_unchecked(alpha.view(), c.view());
        let obj0 = self.smooth_from_margins(&t, alpha.view(), cfg.lambda1)
            + cfg.lambda2 * group_norm(c.view());
        let blowup = F::lit(DIVERGENCE_FACTOR) * obj0.abs().max(F::lit(1e-12));
        let mut trace = vec![obj0];
        let mut converged = false;
        let mut iterations = 0;

        while iterations < cfg.max_iter {
            iterations += 1;
            let (ga, gc) = self.grads_from_margins(&t, alpha.view(), cfg.lambda1);
            let mut next_a = alpha.clone();
            next_a.scaled_add(-delta, &ga);
            let mut next_c = c.clone();
            next_c.scaled_add(-delta, &gc);
            prox_group_inplace(&mut next_c, threshold);

            t = self.margins_unchecked(next_a.view(), next_c.view());
            let obj = self.smooth_from_margins(&t, next_a.view(), cfg.lambda1)
                + cfg.lambda2 * group_norm(next_c.view());
            if !obj.is_finite() || obj > blowup {
                return Err(SglError::StepSize(format!(
                    "objective diverged to {obj} at iteration {iterations}; use a smaller step"
                )));
            }
            trace.push(obj);

            let da = &next_a - &alpha;
            let change =
                (da.dot(&da) + crate::prox::frobenius_diff(next_c.view(), c.view()).powi(2)).sqrt();
            let size = (alpha.dot(&alpha) + frobenius(c.view()).powi(2))
                .sqrt()
                .max(F::one());
            alpha = next_a;
            c = next_c;
            if change <= cfg.tol * size {
                converged = true;
                break;
            }
        }

        let (ga, gc) = self.grads_from_margins(&t, alpha.view(), cfg.lambda1);
        let alpha_residual = (&ga * delta).dot(&(&ga * delta)).sqrt();
        let coefficient_residual = {
            let mut d = c.clone();
            d.scaled_add(-delta, &gc);
            prox_group_inplace(&mut d, threshold);
            crate::prox::frobenius_diff(d.view(), c.view())
        };
        let report = ClassFitReport {
            report: FitReport {
                iterations,
                final_objective: *trace.last().expect("start value"),
                objective_trace: trace,
                fixed_point_residual: (alpha_residual * alpha_residual
                    + coefficient_residual * coefficient_residual)
                    .sqrt(),
                converged,
                step: delta,
            },
            alpha_residual,
            coefficient_residual,
        };
        let kernel = match self.pre.kernel() {
            Some(k) => *k,
            None => return invalid("model needs a problem built from a kernel spec"),
        };
        let model = ClassModel {
            alpha,
            c_tilde: CoefficientMatrix(c),
            kernel,
            training_x: self.pre.x().to_owned(),
            training_fingerprint: self.fingerprint.clone(),
        };
        Ok((model, report))
    }
}

pub fn fit_classification<F: Float>(
    data: &Dataset<F>,
    cfg: &ClassificationConfig<F>,
) -> Result<(ClassModel<F>, ClassFitReport<F>)> {
    ClassificationProblem::new(data, cfg)?.fit(cfg)
}

#[derive(Debug, Clone, Serialize)]
pub struct LooOutcome<F> {
    pub errors: usize,
    pub n: usize,
    pub predictions: Vec<F>,
}

/// Leave-one-out misclassification count: each sample is predicted by a
/// model refitted (bandwidths included) on the remaining samples. Folds run
/// in parallel; the result does not depend on scheduling.
pub fn loo_error<F: Float>(
    data: &Dataset<F>,
    cfg: &ClassificationConfig<F>,
) -> Result<LooOutcome<F>> {
    let n = data.n_samples();
    let preds: Vec<Result<F>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let keep: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            let train = data.select_samples(&keep)?;
            let (model, _) = fit_classification(&train, cfg)?;
            model.predict_label(data.sample(i))
        })
        .collect();
    let predictions = preds.into_iter().collect::<Result<Vec<F>>>()?;
    let errors = predictions
        .iter()
        .zip(data.y().iter())
        .filter(|(a, b)| a != b)
        .count();
    Ok(LooOutcome {
        errors,
        n,
        predictions,
    })
}
