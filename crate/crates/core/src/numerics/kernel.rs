//! Mercer kernels and their Gram matrices.

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use super::weights::Bandwidth;
use crate::dataset::Dataset;
use crate::error::{Result, SglError};
use crate::scalar::Float;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelKind {
    /// `1 + xᵀu`
    LinearPlusOne,
    /// `xᵀu`
    Linear,
    /// `exp(-‖x-u‖² / (2s²))`
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec<F> {
    pub kind: KernelKind,
    /// Only read for [`KernelKind::Gaussian`].
    pub bandwidth: Bandwidth<F>,
}

impl<F: Float> KernelSpec<F> {
    pub fn linear_plus_one() -> Self {
        Self {
            kind: KernelKind::LinearPlusOne,
            bandwidth: Bandwidth::MedianHalf,
        }
    }

    pub fn linear() -> Self {
        Self {
            kind: KernelKind::Linear,
            bandwidth: Bandwidth::MedianHalf,
        }
    }

    pub fn gaussian(bandwidth: Bandwidth<F>) -> Self {
        Self {
            kind: KernelKind::Gaussian,
            bandwidth,
        }
    }

    /// Replaces a data-driven bandwidth with its value on `data`.
    pub fn resolve(&self, data: &Dataset<F>) -> Result<ResolvedKernel<F>> {
        let bandwidth = match self.kind {
            KernelKind::Gaussian => {
                let s = self.bandwidth.resolve(data)?;
                if !(s > F::zero()) || !s.is_finite() {
                    return Err(SglError::InvalidInput(format!(
                        "Gaussian kernel bandwidth must be positive, got {s}"
                    )));
                }
                s
            }
            _ => F::one(),
        };
        Ok(ResolvedKernel {
            kind: self.kind,
            bandwidth,
        })
    }
}

/// Kernel with a concrete bandwidth, ready for evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedKernel<F> {
    pub kind: KernelKind,
    pub bandwidth: F,
}

impl<F: Float> ResolvedKernel<F> {
    pub fn eval(&self, x: ArrayView1<F>, u: ArrayView1<F>) -> F {
        match self.kind {
            KernelKind::LinearPlusOne => F::one() + x.dot(&u),
            KernelKind::Linear => x.dot(&u),
            KernelKind::Gaussian => {
                let d2: F = x
                    .iter()
                    .zip(u.iter())
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum();
                (-d2 / (F::lit(2.0) * self.bandwidth * self.bandwidth)).exp()
            }
        }
    }

    /// Gram matrix `K[i][j] = k(x_i, x_j)`, symmetrized by averaging with its transpose.
    pub fn gram(&self, data: &Dataset<F>) -> Result<Array2<F>> {
        let n = data.n_samples();
        let x = data.x();
        let mut k = Array2::<F>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let v = self.eval(x.row(i), x.row(j));
                if !v.is_finite() {
                    return Err(SglError::InvalidInput(format!(
                        "kernel value for pair ({i}, {j}) is not finite"
                    )));
                }
                k[[i, j]] = v;
            }
        }
        super::linalg::symmetrize(&mut k);
        Ok(k)
    }

    /// Row vector `[k(x, x_1), …, k(x, x_n)]` against the samples of `data`.
    pub fn cross(&self, x: ArrayView1<F>, data: &Dataset<F>) -> ndarray::Array1<F> {
        data.x()
            .rows()
            .into_iter()
            .map(|xi| self.eval(x, xi))
            .collect()
    }
}

/// Gram matrix of `data` under `spec`.
pub fn kernel_matrix<F: Float>(data: &Dataset<F>, spec: &KernelSpec<F>) -> Result<Array2<F>> {
    spec.resolve(data)?.gram(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::symmetric_eigen;
    use ndarray::array;
    use proptest::prelude::*;

    fn ds(x: Array2<f64>) -> Dataset<f64> {
        let n = x.nrows();
        Dataset::regression(x, ndarray::Array1::zeros(n)).unwrap()
    }

    #[test]
    fn single_sample_linear_plus_one() {
        let k = ResolvedKernel {
            kind: KernelKind::LinearPlusOne,
            bandwidth: 1.0,
        };
        let z = array![0.0];
        assert_eq!(k.eval(z.view(), z.view()), 1.0);
    }

    #[test]
    fn identical_samples_gaussian() {
        let data = ds(array![[0.3, -1.0], [0.3, -1.0]]);
        let k = kernel_matrix(&data, &KernelSpec::gaussian(Bandwidth::Value(0.7))).unwrap();
        assert_eq!(k, array![[1.0, 1.0], [1.0, 1.0]]);
    }

    #[test]
    fn unit_vectors_linear_plus_one() {
        let data = ds(array![[1.0, 0.0], [0.0, 1.0]]);
        let k = kernel_matrix(&data, &KernelSpec::linear_plus_one()).unwrap();
        assert_eq!(k, array![[2.0, 1.0], [1.0, 2.0]]);
    }

    #[test]
    fn gaussian_requires_positive_bandwidth() {
        let data = ds(array![[0.0], [1.0]]);
        assert!(kernel_matrix(&data, &KernelSpec::gaussian(Bandwidth::Value(0.0))).is_err());
    }

    #[test]
    fn overflowing_kernel_names_pair() {
        let data = ds(array![[1e200], [1e200]]);
        let err = kernel_matrix(&data, &KernelSpec::linear()).unwrap_err();
        assert!(err.to_string().contains("(0, 0)"));
    }

    proptest! {
        #[test]
        fn gram_is_symmetric_psd(vals in proptest::collection::vec(-3.0f64..3.0, 24), kind in 0usize..3) {
            let x = Array2::from_shape_vec((8, 3), vals).unwrap();
            let data = ds(x);
            let spec = match kind {
                0 => KernelSpec::linear_plus_one(),
                1 => KernelSpec::linear(),
                _ => KernelSpec::gaussian(Bandwidth::Value(1.3)),
            };
            let k = kernel_matrix(&data, &spec).unwrap();
            prop_assert_eq!(&k, &k.t().to_owned());
            let e = symmetric_eigen(k.view()).unwrap();
            let lmax = e.values[0];
            prop_assert!(e.values[e.values.len() - 1] >= -1e-8 * lmax.max(1e-300));
        }
    }
}
