//! Locality weights over sample pairs and the median-distance bandwidth rule.

use ndarray::Array2;

use crate::dataset::Dataset;
use crate::error::{Result, SglError};
use crate::scalar::Float;

/// A bandwidth given directly or derived from the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth<F> {
    Value(F),
    /// Half of the median pairwise Euclidean distance.
    MedianHalf,
}

impl<F: Float> Bandwidth<F> {
    pub fn resolve(&self, data: &Dataset<F>) -> Result<F> {
        match *self {
            Bandwidth::Value(s) => Ok(s),
            Bandwidth::MedianHalf => median_bandwidth(data),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// `ω_ij = exp(-‖x_j - x_i‖² / (2s²))` for every pair.
    GaussianAllPairs,
    /// `ω_ij = exp(-2‖x_i - x_j‖² / s²)` if `x_j` is one of the `k` nearest
    /// neighbours of `x_i` (self excluded), zero otherwise. Not symmetric in general.
    TruncatedKnn { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec<F> {
    pub kind: WeightKind,
    pub bandwidth: Bandwidth<F>,
}

impl<F: Float> WeightSpec<F> {
    pub fn gaussian(bandwidth: Bandwidth<F>) -> Self {
        Self {
            kind: WeightKind::GaussianAllPairs,
            bandwidth,
        }
    }

    pub fn knn(k: usize, bandwidth: Bandwidth<F>) -> Self {
        Self {
            kind: WeightKind::TruncatedKnn { k },
            bandwidth,
        }
    }
}

fn sq_dist<F: Float>(data: &Dataset<F>, i: usize, j: usize) -> F {
    data.sample(i)
        .iter()
        .zip(data.sample(j).iter())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum()
}

pub fn weights<F: Float>(data: &Dataset<F>, spec: &WeightSpec<F>) -> Result<Array2<F>> {
    let n = data.n_samples();
    let s = spec.bandwidth.resolve(data)?;
    if !(s > F::zero()) || !s.is_finite() {
        return Err(SglError::InvalidInput(format!(
            "weight bandwidth must be positive, got {s}"
        )));
    }
    let mut d2 = Array2::<F>::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let v = sq_dist(data, i, j);
            d2[[i, j]] = v;
            d2[[j, i]] = v;
        }
    }
    let two = F::lit(2.0);
    match spec.kind {
        WeightKind::GaussianAllPairs => {
            let denom = two * s * s;
            Ok(d2.mapv(|v| (-v / denom).exp()))
        }
        WeightKind::TruncatedKnn { k } => {
            if k == 0 || k >= n {
                return Err(SglError::InvalidInput(format!(
                    "k_neighbors must be in [1, n-1] = [1, {}], got {k}",
                    n - 1
                )));
            }
            let mut w = Array2::<F>::zeros((n, n));
            let mut others: Vec<usize> = Vec::with_capacity(n - 1);
            for i in 0..n {
                others.clear();
                others.extend((0..n).filter(|&j| j != i));
                // ties go to the lower sample index
                others.sort_by(|&a, &b| {
                    d2[[i, a]]
                        .partial_cmp(&d2[[i, b]])
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(a.cmp(&b))
                });
                for &j in &others[..k] {
                    w[[i, j]] = (-two * d2[[i, j]] / (s * s)).exp();
                }
            }
            Ok(w)
        }
    }
}

/// Half the median of all `n(n-1)/2` pairwise distances; an even count uses
/// the mean of the two central values.
pub fn median_bandwidth<F: Float>(data: &Dataset<F>) -> Result<F> {
    let n = data.n_samples();
    let mut d: Vec<F> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            d.push(sq_dist(data, i, j).sqrt());
        }
    }
    if d.iter().all(|&v| v == F::zero()) {
        return Err(SglError::DegenerateData(
            "all pairwise distances are zero".into(),
        ));
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let m = d.len();
    let half = F::lit(0.5);
    let median = if m % 2 == 1 {
        d[m / 2]
    } else {
        (d[m / 2 - 1] + d[m / 2]) * half
    };
    Ok(median * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn ds(x: Array2<f64>) -> Dataset<f64> {
        let n = x.nrows();
        Dataset::regression(x, Array1::zeros(n)).unwrap()
    }

    #[test]
    fn gaussian_diagonal_and_distance_s() {
        let data = ds(array![[0.0, 0.0], [0.6, 0.8]]);
        let w = weights(&data, &WeightSpec::gaussian(Bandwidth::Value(1.0))).unwrap();
        assert_eq!(w[[0, 0]], 1.0);
        assert_eq!(w[[1, 1]], 1.0);
        assert!((w[[0, 1]] - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(w[[0, 1]], w[[1, 0]]);
    }

    #[test]
    fn knn_collinear_pattern() {
        let data = ds(array![[0.0], [1.0], [10.0]]);
        let w = weights(&data, &WeightSpec::knn(1, Bandwidth::Value(5.0))).unwrap();
        // brute-force nearest neighbour of each point
        let pts = [0.0f64, 1.0, 10.0];
        for i in 0..3 {
            let nn = (0..3)
                .filter(|&j| j != i)
                .min_by(|&a, &b| {
                    (pts[a] - pts[i])
                        .abs()
                        .partial_cmp(&(pts[b] - pts[i]).abs())
                        .unwrap()
                })
                .unwrap();
            for j in 0..3 {
                if j == nn {
                    assert!(w[[i, j]] > 0.0);
                } else {
                    assert_eq!(w[[i, j]], 0.0);
                }
            }
        }
        assert!((w[[0, 1]] - (-2.0f64 / 25.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn knn_ties_prefer_lower_index() {
        let data = ds(array![[0.0], [-1.0], [1.0]]);
        let w = weights(&data, &WeightSpec::knn(1, Bandwidth::Value(1.0))).unwrap();
        assert!(w[[0, 1]] > 0.0);
        assert_eq!(w[[0, 2]], 0.0);
    }

    #[test]
    fn knn_rejects_k_too_large() {
        let data = ds(array![[0.0], [1.0]]);
        assert!(weights(&data, &WeightSpec::knn(2, Bandwidth::Value(1.0))).is_err());
    }

    #[test]
    fn weights_in_unit_interval() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let data = ds(Array2::from_shape_fn((12, 4), |_| {
            rng.random_range(-2.0..2.0)
        }));
        for spec in [
            WeightSpec::gaussian(Bandwidth::MedianHalf),
            WeightSpec::knn(4, Bandwidth::MedianHalf),
        ] {
            let w = weights(&data, &spec).unwrap();
            assert!(w.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn median_small_cases() {
        let two = ds(array![[0.0, 0.0], [0.0, 4.0]]);
        assert_eq!(median_bandwidth(&two).unwrap(), 2.0);
        // pairwise distances 1, 2, 3
        let three = ds(array![[0.0], [1.0], [3.0]]);
        assert_eq!(median_bandwidth(&three).unwrap(), 1.0);
        let same = ds(array![[1.0], [1.0]]);
        assert!(matches!(
            median_bandwidth(&same),
            Err(SglError::DegenerateData(_))
        ));
    }

    #[test]
    fn median_matches_enumeration() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let x = Array2::from_shape_fn((10, 3), |_| rng.random_range(0.0f64..1.0));
        let mut d = Vec::new();
        for i in 0..10 {
            for j in i + 1..10 {
                let diff = &x.row(i) - &x.row(j);
                d.push(diff.dot(&diff).sqrt());
            }
        }
        assert_eq!(d.len(), 45);
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(median_bandwidth(&ds(x)).unwrap(), 0.5 * d[22]);
    }
}
