//! Matrices precomputed once per training set and the pairwise linear map
//! `C̃ ↦ {(x_j - x_i)ᵀ C̃ k_i^{1/2}}` together with its adjoint.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::dataset::Dataset;
use crate::error::{invalid, Result};
use crate::numerics::{
    psd_sqrt, reduced_geometry, weights, KernelSpec, ReducedGeometry, ResolvedKernel, WeightSpec,
};
use crate::scalar::Float;

/// Whether gradients go through the economy-SVD factorization `x_j - x_i = U(β_j - β_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// On when there are more variables than samples.
    #[default]
    Auto,
    On,
    Off,
}

impl Reduction {
    pub fn enabled(self, n: usize, p: usize) -> bool {
        match self {
            Reduction::Auto => p > n,
            Reduction::On => true,
            Reduction::Off => false,
        }
    }
}

/// Sample pair `(i, j)` with a nonzero weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair<F> {
    pub i: usize,
    pub j: usize,
    pub w: F,
}

#[derive(Debug, Clone)]
pub struct Precomputed<F> {
    x: Array2<F>,
    kernel: Option<ResolvedKernel<F>>,
    k: Array2<F>,
    k_half: Array2<F>,
    k_half_pinv: Array2<F>,
    k_norm: F,
    weights: Array2<F>,
    /// Nonzero weights in row-major order over `(i, j)`.
    pairs: Vec<Pair<F>>,
    geometry: Option<ReducedGeometry<F>>,
}

impl<F: Float> Precomputed<F> {
    pub fn build(
        data: &Dataset<F>,
        kernel: &KernelSpec<F>,
        weight_spec: &WeightSpec<F>,
        reduction: Reduction,
    ) -> Result<Self> {
        let kernel = kernel.resolve(data)?;
        let k = kernel.gram(data)?;
        let w = weights(data, weight_spec)?;
        let mut pre = Self::from_parts(data.x().to_owned(), k, w, reduction)?;
        pre.kernel = Some(kernel);
        Ok(pre)
    }

    /// Assembles the precomputation from an explicit Gram matrix and weights.
    pub fn from_parts(
        x: Array2<F>,
        k: Array2<F>,
        weights: Array2<F>,
        reduction: Reduction,
    ) -> Result<Self> {
        let (n, p) = x.dim();
        if k.dim() != (n, n) || weights.dim() != (n, n) {
            return invalid(format!(
                "kernel {:?} and weights {:?} must both be {n}x{n}",
                k.dim(),
                weights.dim()
            ));
        }
        let sqrt = psd_sqrt(k.view())?;
        let k_norm = sqrt.eigenvalues.iter().fold(F::zero(), |a, &b| a.max(b));
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let w = weights[[i, j]];
                if w != F::zero() {
                    pairs.push(Pair { i, j, w });
                }
            }
        }
        let geometry = if reduction.enabled(n, p) {
            // y is irrelevant to the geometry
            let data = Dataset::regression(x.clone(), Array1::zeros(n))?;
            Some(reduced_geometry(&data)?)
        } else {
            None
        };
        Ok(Self {
            x,
            kernel: None,
            k,
            k_half: sqrt.half,
            k_half_pinv: sqrt.half_pinv,
            k_norm,
            weights,
            pairs,
            geometry,
        })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> ArrayView2<'_, F> {
        self.x.view()
    }

    pub fn kernel(&self) -> Option<&ResolvedKernel<F>> {
        self.kernel.as_ref()
    }

    pub fn k(&self) -> ArrayView2<'_, F> {
        self.k.view()
    }

    pub fn k_half(&self) -> ArrayView2<'_, F> {
        self.k_half.view()
    }

    pub fn k_half_pinv(&self) -> ArrayView2<'_, F> {
        self.k_half_pinv.view()
    }

    /// Spectral norm of `K`.
    pub fn k_norm(&self) -> F {
        self.k_norm
    }

    pub fn weights(&self) -> ArrayView2<'_, F> {
        self.weights.view()
    }

    pub fn pairs(&self) -> &[Pair<F>] {
        &self.pairs
    }

    pub fn geometry(&self) -> Option<&ReducedGeometry<F>> {
        self.geometry.as_ref()
    }

    pub fn is_reduced(&self) -> bool {
        self.geometry.is_some()
    }

    pub(crate) fn check_coefficients(&self, c: ArrayView2<F>) -> Result<()> {
        if c.dim() != (self.p(), self.n()) {
            return invalid(format!(
                "coefficient matrix is {:?}, expected {:?}",
                c.dim(),
                (self.p(), self.n())
            ));
        }
        Ok(())
    }

    /// `(x_j - x_i)ᵀ C̃ k_i^{1/2}` for every stored pair, in pair order.
    pub fn pair_projections(&self, c: ArrayView2<F>) -> Vec<F> {
        // column i of A is C̃ k_i^{1/2}; P[j][i] = x_jᵀ a_i. Zero rows of C̃
        // contribute nothing, so only the active ones are multiplied.
        let active: Vec<usize> = c
            .rows()
            .into_iter()
            .enumerate()
            .filter(|(_, r)| r.iter().any(|&v| v != F::zero()))
            .map(|(j, _)| j)
            .collect();
        let proj = if active.len() * 2 < self.p() {
            let a = c.select(Axis(0), &active).dot(&self.k_half);
            self.x.select(Axis(1), &active).dot(&a)
        } else {
            self.x.dot(&c.dot(&self.k_half))
        };
        self.pairs
            .iter()
            .map(|pr| proj[[pr.j, pr.i]] - proj[[pr.i, pr.i]])
            .collect()
    }

    /// `Σ_{pairs} q_ij (x_j - x_i)(k_i^{1/2})ᵀ` as a `p × n` matrix, for `q`
    /// aligned with [`Self::pairs`]. Uses `U(β_j - β_i)` in place of
    /// `x_j - x_i` when the reduction is active.
    pub fn pair_adjoint(&self, q: &[F]) -> Array2<F> {
        let n = self.n();
        let mut qm = Array2::<F>::zeros((n, n));
        let mut s = Array1::<F>::zeros(n);
        for (pr, &v) in self.pairs.iter().zip(q) {
            qm[[pr.i, pr.j]] += v;
            s[pr.i] += v;
        }
        match &self.geometry {
            None => self.adjoint_with(&qm, &s, self.x.view()),
            Some(g) => {
                let bt = g.beta.t();
                let reduced = self.adjoint_with(&qm, &s, bt);
                g.u.dot(&reduced)
            }
        }
    }

    /// With rows of `z` as sample coordinates `z_i`:
    /// `Σ_ij Q_ij (z_j - z_i)(k_i^{1/2})ᵀ = (Q Z - diag(s) Z)ᵀ K^{1/2}`.
    fn adjoint_with(&self, qm: &Array2<F>, s: &Array1<F>, z: ArrayView2<F>) -> Array2<F> {
        let mut vt = qm.dot(&z);
        for (mut row, (&si, zi)) in vt.rows_mut().into_iter().zip(s.iter().zip(z.rows())) {
            row.scaled_add(-si, &zi);
        }
        vt.t().dot(&self.k_half)
    }

    /// Per-pair `αᵀ k_i`, the intercept function at the anchor sample.
    pub fn pair_intercepts(&self, alpha: ArrayView1<F>) -> Vec<F> {
        let f0 = self.k.dot(&alpha);
        self.pairs.iter().map(|pr| f0[pr.i]).collect()
    }

    /// `Σ_{pairs} q_ij k_i = K s` with `s_i = Σ_j q_ij`.
    pub fn pair_intercept_adjoint(&self, q: &[F]) -> Array1<F> {
        let mut s = Array1::<F>::zeros(self.n());
        for (pr, &v) in self.pairs.iter().zip(q) {
            s[pr.i] += v;
        }
        self.k.dot(&s)
    }

    /// Evaluates the gradient functions at the training samples: column `i`
    /// holds `(f^1(x_i), …, f^p(x_i))`, i.e. `C̃ K^{1/2}`.
    pub fn gradients_at_samples(&self, c: ArrayView2<F>) -> Array2<F> {
        c.dot(&self.k_half)
    }
}
