//! Linear LASSO baseline: cyclic coordinate descent on a standardized design.
//!
//! Minimizes `(1/2n)‖y − ȳ − Zb‖² + λ‖b‖₁` where `Z` holds the predictors
//! centred and scaled to unit variance (divisor `n`). `λ` therefore lives on
//! the standardized scale; coefficients are mapped back to the original
//! scale on return. Constant predictors keep a zero coefficient.
//!
//! This is the penalized form. A constraint-form path `‖b‖₁ ≤ t` traces the
//! same solutions with `t = ‖b(λ)‖₁`.

use ndarray::{Array1, Array2, Axis};
use serde::Serialize;

use crate::dataset::{Dataset, Task};
use crate::error::{invalid, Result};
use crate::regression::log_grid;
use crate::scalar::Float;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_SWEEPS: usize = 10_000;
pub const MAX_BISECTION_STEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LassoTarget<F> {
    Lambda(F),
    /// Search `λ` so that exactly this many coefficients are nonzero.
    Cardinality(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LassoConfig<F> {
    pub target: LassoTarget<F>,
    /// Sweeps stop once the largest coefficient change is at most `tol`.
    pub tol: F,
    pub max_sweeps: usize,
}

impl<F: Float> LassoConfig<F> {
    pub fn lambda(lambda: F) -> Self {
        Self {
            target: LassoTarget::Lambda(lambda),
            tol: F::lit(DEFAULT_TOL),
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }

    pub fn cardinality(k: usize) -> Self {
        Self {
            target: LassoTarget::Cardinality(k),
            ..Self::lambda(F::zero())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LassoFit<F> {
    pub lambda: F,
    /// Original-scale coefficients.
    pub coefficients: Array1<F>,
    pub intercept: F,
    /// Coefficients on the standardized scale.
    pub standardized: Array1<F>,
    pub sweeps: usize,
    pub converged: bool,
    /// False when a cardinality search returned the nearest achievable count.
    pub exact: bool,
}

impl<F: Float> LassoFit<F> {
    pub fn support(&self) -> Vec<usize> {
        (0..self.standardized.len())
            .filter(|&j| self.standardized[j] != F::zero())
            .collect()
    }
}

/// Standardized design and centred response, shared by every `λ`.
#[derive(Debug, Clone)]
pub struct LassoProblem<F> {
    z: Array2<F>,
    r0: Array1<F>,
    means: Array1<F>,
    scales: Array1<F>,
    y_mean: F,
}

impl<F: Float> LassoProblem<F> {
    pub fn new(data: &Dataset<F>) -> Result<Self> {
        if data.task() != Task::Regression {
            return invalid("LASSO baseline needs a regression dataset");
        }
        let n = F::from_usize_lossy(data.n_samples());
        let means = data.x().mean_axis(Axis(0)).expect("n >= 2");
        let mut z = &data.x() - &means;
        let mut scales = Array1::zeros(data.n_vars());
        for (j, mut col) in z.columns_mut().into_iter().enumerate() {
            let s = (col.dot(&col) / n).sqrt();
            scales[j] = s;
            if s > F::zero() {
                col.mapv_inplace(|v| v / s);
            }
        }
        let y_mean = data.y().mean().expect("n >= 2");
        Ok(Self {
            z,
            r0: data.y().mapv(|v| v - y_mean),
            means,
            scales,
            y_mean,
        })
    }

    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    pub fn p(&self) -> usize {
        self.z.ncols()
    }

    pub fn standardized_design(&self) -> &Array2<F> {
        &self.z
    }

    /// `max_j |z_jᵀ(y − ȳ)| / n`: the smallest `λ` with an all-zero solution.
    pub fn lambda_max(&self) -> F {
        let n = F::from_usize_lossy(self.n());
        self.z
            .t()
            .dot(&self.r0)
            .iter()
            .fold(F::zero(), |m, &v| m.max(v.abs() / n))
    }

    /// `(1/2n)‖r‖² + λ‖b‖₁` for standardized coefficients `b`.
    pub fn objective(&self, b: &Array1<F>, lambda: F) -> F {
        let r = &self.r0 - &self.z.dot(b);
        let n = F::from_usize_lossy(self.n());
        r.dot(&r) / (F::lit(2.0) * n) + lambda * b.iter().map(|v| v.abs()).sum::<F>()
    }

    /// `z_jᵀ r / n` for every predictor at standardized coefficients `b`.
    pub fn correlations(&self, b: &Array1<F>) -> Array1<F> {
        let r = &self.r0 - &self.z.dot(b);
        self.z.t().dot(&r) / F::from_usize_lossy(self.n())
    }

    /// Coordinate descent from `warm` (standardized scale).
    pub fn solve(
        &self,
        lambda: F,
        warm: Option<&Array1<F>>,
        tol: F,
        max_sweeps: usize,
    ) -> Result<LassoFit<F>> {
        if !(lambda >= F::zero()) {
            return invalid("lambda must be nonnegative");
        }
        let (n, p) = (self.n(), self.p());
        let nf = F::from_usize_lossy(n);
        let mut b = match warm {
            Some(w) if w.len() == p => w.clone(),
            Some(_) => return invalid("warm start has the wrong length"),
            None => Array1::zeros(p),
        };
        let mut r = &self.r0 - &self.z.dot(&b);
        let mut sweeps = 0;
        let mut converged = false;
        while sweeps < max_sweeps {
            sweeps += 1;
            let mut biggest = F::zero();
            for j in 0..p {
                if self.scales[j] == F::zero() {
                    continue;
                }
                let col = self.z.column(j);
                let old = b[j];
                let rho = col.dot(&r) / nf + old;
                let new = soft_threshold(rho, lambda);
                if new != old {
                    r.scaled_add(old - new, &col);
                    b[j] = new;
                    biggest = biggest.max((new - old).abs());
                }
            }
            if biggest <= tol {
                converged = true;
                break;
            }
        }
        Ok(self.finish(lambda, b, sweeps, converged))
    }

    fn finish(&self, lambda: F, b: Array1<F>, sweeps: usize, converged: bool) -> LassoFit<F> {
        let coefficients: Array1<F> = b
            .iter()
            .zip(self.scales.iter())
            .map(|(&bj, &s)| if s > F::zero() { bj / s } else { F::zero() })
            .collect();
        let intercept = self.y_mean - coefficients.dot(&self.means);
        LassoFit {
            lambda,
            coefficients,
            intercept,
            standardized: b,
            sweeps,
            converged,
            exact: true,
        }
    }

    /// Log-scale bisection on `λ` for exactly `target` nonzeros. Ties in
    /// distance to the target prefer fewer nonzeros.
    pub fn solve_cardinality(
        &self,
        target: usize,
        tol: F,
        max_sweeps: usize,
    ) -> Result<LassoFit<F>> {
        if target > self.p() {
            return invalid(format!(
                "target cardinality {target} exceeds p = {}",
                self.p()
            ));
        }
        let lmax = self.lambda_max();
        let mut best = self.solve(lmax, None, tol, max_sweeps)?;
        if target == 0 || lmax == F::zero() {
            best.exact = best.support().len() == target;
            return Ok(best);
        }
        let better = |cand: &LassoFit<F>, cur: &LassoFit<F>| {
            let (c, b) = (cand.support().len(), cur.support().len());
            let (dc, db) = (c.abs_diff(target), b.abs_diff(target));
            dc < db || (dc == db && c < b)
        };
        let mut hi = lmax;
        let mut lo = lmax * F::lit(1e-6);
        let mut warm = best.standardized.clone();
        let at_lo = self.solve(lo, None, tol, max_sweeps)?;
        if at_lo.support().len() < target {
            lo = F::zero();
        }
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = if lo > F::zero() {
                (lo * hi).sqrt()
            } else {
                F::lit(0.5) * hi
            };
            let fit = self.solve(mid, Some(&warm), tol, max_sweeps)?;
            let count = fit.support().len();
            let hit = count == target;
            if count > target {
                lo = mid;
            } else {
                hi = mid;
                warm = fit.standardized.clone();
            }
            if better(&fit, &best) {
                best = fit;
            }
            if hit {
                break;
            }
        }
        best.exact = best.support().len() == target;
        Ok(best)
    }
}

fn soft_threshold<F: Float>(v: F, t: F) -> F {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        F::zero()
    }
}

pub fn lasso_lambda_max<F: Float>(data: &Dataset<F>) -> Result<F> {
    Ok(LassoProblem::new(data)?.lambda_max())
}

pub fn lasso_fit<F: Float>(data: &Dataset<F>, cfg: &LassoConfig<F>) -> Result<LassoFit<F>> {
    let prob = LassoProblem::new(data)?;
    match cfg.target {
        LassoTarget::Lambda(l) => prob.solve(l, None, cfg.tol, cfg.max_sweeps),
        LassoTarget::Cardinality(k) => prob.solve_cardinality(k, cfg.tol, cfg.max_sweeps),
    }
}

/// Warm-started fits along a strictly descending grid. `None` uses 50
/// log-spaced values from `λ_max` down to `1e-3·λ_max`.
pub fn lasso_path<F: Float>(
    data: &Dataset<F>,
    grid: Option<&[F]>,
    tol: F,
    max_sweeps: usize,
) -> Result<Vec<LassoFit<F>>> {
    let prob = LassoProblem::new(data)?;
    let grid = match grid {
        Some([]) => return invalid("lambda grid is empty"),
        Some(g) if g.windows(2).any(|w| !(w[0] > w[1])) => {
            return invalid("lambda grid must be strictly descending")
        }
        Some(g) => g.to_vec(),
        None => log_grid(prob.lambda_max(), F::lit(1e-3), 50),
    };
    let mut warm: Option<Array1<F>> = None;
    let mut out = Vec::with_capacity(grid.len());
    for lambda in grid {
        let fit = prob.solve(lambda, warm.as_ref(), tol, max_sweeps)?;
        warm = Some(fit.standardized.clone());
        out.push(fit);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn random_data(n: usize, p: usize, seed: u64) -> Dataset<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, p), |_| rng.random_range(-1.0f64..1.0));
        let y = Array1::from_shape_fn(n, |i| {
            2.0 * x[[i, 0]] - x[[i, 1]] + 0.3 * rng.random_range(-1.0..1.0)
        });
        Dataset::regression(x, y).unwrap()
    }

    #[test]
    fn zero_above_lambda_max() {
        let d = random_data(30, 6, 1);
        let lmax = lasso_lambda_max(&d).unwrap();
        let fit = lasso_fit(&d, &LassoConfig::lambda(lmax)).unwrap();
        assert!(fit.coefficients.iter().all(|&v| v == 0.0));
        assert!((fit.intercept - d.y().mean().unwrap()).abs() < 1e-14);
        let fit = lasso_fit(&d, &LassoConfig::lambda(0.99 * lmax)).unwrap();
        assert_eq!(fit.support().len(), 1);
    }

    #[test]
    fn orthonormal_design_is_soft_thresholded_regression() {
        // Columns are centred, mutually orthogonal and have variance 1 under
        // divisor n, so Z = X and each coefficient is S(z_jᵀy/n, λ).
        let x = array![
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0]
        ];
        let y = array![3.0f64, 1.0, -0.5, 0.25];
        let d = Dataset::regression(x.clone(), y.clone()).unwrap();
        let lambda = 0.4;
        let fit = lasso_fit(&d, &LassoConfig::lambda(lambda)).unwrap();
        let yc = &y - y.mean().unwrap();
        for j in 0..3 {
            let u = x.column(j).dot(&yc) / 4.0;
            let want = soft_threshold(u, lambda);
            assert!((fit.coefficients[j] - want).abs() < 1e-12, "j={j}");
        }
    }

    #[test]
    fn kkt_at_convergence() {
        let d = random_data(40, 8, 2);
        let prob = LassoProblem::new(&d).unwrap();
        let lambda = 0.2 * prob.lambda_max();
        let fit = prob.solve(lambda, None, 1e-10, 100_000).unwrap();
        assert!(fit.converged);
        let g = prob.correlations(&fit.standardized);
        for j in 0..8 {
            if fit.standardized[j] == 0.0 {
                assert!(g[j].abs() <= lambda + 1e-6);
            } else {
                assert!((g[j] - lambda * fit.standardized[j].signum()).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn path_matches_cold_starts() {
        let d = random_data(25, 5, 3);
        let path = lasso_path(&d, None, 1e-12, 100_000).unwrap();
        assert!(path[0].coefficients.iter().all(|&v| v == 0.0));
        for fit in [&path[0], &path[path.len() - 1]] {
            let cold = lasso_fit(
                &d,
                &LassoConfig {
                    tol: 1e-12,
                    max_sweeps: 100_000,
                    ..LassoConfig::lambda(fit.lambda)
                },
            )
            .unwrap();
            for j in 0..5 {
                assert!((cold.coefficients[j] - fit.coefficients[j]).abs() <= 1e-8);
            }
        }
        assert!(lasso_path(&d, Some(&[]), 1e-8, 10).is_err());
        assert!(lasso_path(&d, Some(&[0.1, 0.2]), 1e-8, 10).is_err());
    }

    #[test]
    fn cardinality_search() {
        let d = random_data(50, 8, 4);
        for k in 0..=3 {
            let fit = lasso_fit(&d, &LassoConfig::cardinality(k)).unwrap();
            assert!(fit.exact);
            assert_eq!(fit.support().len(), k);
        }
        assert!(lasso_fit(&d, &LassoConfig::cardinality(9)).is_err());
    }

    #[test]
    fn constant_column_stays_zero() {
        let x = array![[1.0, 2.0], [1.0, 0.0], [1.0, 5.0], [1.0, 1.0]];
        let d = Dataset::regression(x, array![1.0, 0.0, 3.0, 0.5]).unwrap();
        let fit = lasso_fit(&d, &LassoConfig::lambda(0.0)).unwrap();
        assert_eq!(fit.coefficients[0], 0.0);
        assert!(fit.coefficients[1] > 0.0);
    }

    #[test]
    fn objective_non_increasing_per_sweep() {
        let d = random_data(30, 6, 5);
        let prob = LassoProblem::new(&d).unwrap();
        let lambda = 0.1 * prob.lambda_max();
        let mut prev = prob.objective(&Array1::zeros(6), lambda);
        let mut b = Array1::zeros(6);
        for _ in 0..20 {
            b = prob.solve(lambda, Some(&b), 0.0, 1).unwrap().standardized;
            let cur = prob.objective(&b, lambda);
            assert!(cur <= prev + 1e-15);
            prev = cur;
        }
    }
}
