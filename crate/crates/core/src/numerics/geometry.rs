use ndarray::{Array2, Axis};

use super::linalg::thin_svd;
use crate::dataset::Dataset;
use crate::error::Result;
use crate::scalar::Float;

/// Economy factorization `M = U·β` of the difference matrix
/// `M = (x_1 - x_n, …, x_n - x_n)` (`p × n`).
///
/// `U` is `p × m` with orthonormal columns and `β` is `m × n`, where
/// `m = min(p, n)`. When `p ≥ n` this is the usual `p × n` economy SVD; when
/// `p < n` the trailing `n - p` singular triplets are necessarily zero and are
/// dropped, so `U` stays square and orthogonal. Column `β_i` is the
/// coordinate of `x_i - x_n` in the basis `U`, hence
/// `x_j - x_i = U(β_j - β_i)`.
#[derive(Debug, Clone)]
pub struct ReducedGeometry<F> {
    pub u: Array2<F>,
    pub beta: Array2<F>,
    pub singular_values: ndarray::Array1<F>,
}

impl<F: Float> ReducedGeometry<F> {
    pub fn rank_dim(&self) -> usize {
        self.u.ncols()
    }
}

/// `p × n` matrix whose column `i` is `x_i - x_n`.
pub fn difference_matrix<F: Float>(data: &Dataset<F>) -> Array2<F> {
    let x = data.x();
    let n = data.n_samples();
    let last = x.row(n - 1);
    let mut m = (&x - &last.insert_axis(Axis(0))).reversed_axes();
    // exact zero regardless of rounding
    m.column_mut(n - 1).fill(F::zero());
    m
}

pub fn reduced_geometry<F: Float>(data: &Dataset<F>) -> Result<ReducedGeometry<F>> {
    let m = difference_matrix(data);
    let (p, n) = m.dim();
    let svd = thin_svd(m.view())?;
    let keep = p.min(n);
    let u = svd.u.slice(ndarray::s![.., ..keep]).to_owned();
    // β = Uᵀ M keeps the last column exactly zero.
    let beta = u.t().dot(&m);
    Ok(ReducedGeometry {
        u,
        beta,
        singular_values: svd.sigma.slice(ndarray::s![..keep]).to_owned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::frobenius;
    use ndarray::{array, Array1};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn ds(x: Array2<f64>) -> Dataset<f64> {
        let n = x.nrows();
        Dataset::regression(x, Array1::zeros(n)).unwrap()
    }

    fn check(data: &Dataset<f64>) {
        let g = reduced_geometry(data).unwrap();
        let m = difference_matrix(data);
        let err = frobenius((&g.u.dot(&g.beta) - &m).view());
        assert!(
            err <= 1e-10 * frobenius(m.view()).max(1.0),
            "recon err {err}"
        );
        let k = g.u.ncols();
        let utu = g.u.t().dot(&g.u);
        assert!(frobenius((&utu - &Array2::<f64>::eye(k)).view()) <= 1e-10);
        assert!(m.column(m.ncols() - 1).iter().all(|&v| v == 0.0));
        assert!(g.beta.column(g.beta.ncols() - 1).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identical_samples_give_zero_beta() {
        let data = ds(array![[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]);
        let g = reduced_geometry(&data).unwrap();
        assert!(g.beta.iter().all(|&v| v == 0.0));
        check(&data);
    }

    #[test]
    fn two_samples_three_four_five() {
        let data = ds(array![[3.0, 4.0], [0.0, 0.0]]);
        let g = reduced_geometry(&data).unwrap();
        let b1 = g.beta.column(0);
        assert!((b1.dot(&b1).sqrt() - 5.0).abs() < 1e-14);
        assert!(g.beta.column(1).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn random_reconstruction_wide_and_tall() {
        let mut rng = ChaCha20Rng::seed_from_u64(58);
        // n = 5 samples in p = 8 (p > n) and n = 8 samples in p = 5 (p < n)
        for &(n, p) in &[(5usize, 8usize), (8, 5), (10, 50), (6, 6)] {
            let x = Array2::from_shape_fn((n, p), |_| rng.random_range(-1.0..1.0));
            check(&ds(x));
        }
    }
}
