//! Row-wise group soft-thresholding, the proximity operator of `t·Σ_j ‖row_j‖₂`.

use ndarray::{Array2, ArrayView2, Zip};

use crate::error::{invalid, Result};
use crate::scalar::Float;

/// Rows with norm `≤ threshold` become exactly zero; the others keep their
/// direction and lose exactly `threshold` of their norm.
pub fn prox_group<F: Float>(d: ArrayView2<F>, threshold: F) -> Result<Array2<F>> {
    if !(threshold >= F::zero()) {
        return invalid(format!("threshold must be nonnegative, got {threshold}"));
    }
    let mut out = d.to_owned();
    prox_group_inplace(&mut out, threshold);
    Ok(out)
}

pub(crate) fn prox_group_inplace<F: Float>(d: &mut Array2<F>, threshold: F) {
    for mut row in d.rows_mut() {
        let norm = row.dot(&row).sqrt();
        if norm <= threshold {
            row.fill(F::zero());
        } else if threshold > F::zero() {
            let scale = (norm - threshold) / norm;
            row.mapv_inplace(|v| v * scale);
        }
    }
}

/// Euclidean norm of every row.
pub fn row_norms<F: Float>(c: ArrayView2<F>) -> ndarray::Array1<F> {
    c.rows().into_iter().map(|r| r.dot(&r).sqrt()).collect()
}

/// `Σ_j ‖row_j‖₂`
pub fn group_norm<F: Float>(c: ArrayView2<F>) -> F {
    row_norms(c).sum()
}

pub(crate) fn frobenius_diff<F: Float>(a: ArrayView2<F>, b: ArrayView2<F>) -> F {
    let mut acc = F::zero();
    Zip::from(a)
        .and(b)
        .for_each(|&x, &y| acc += (x - y) * (x - y));
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn zero_threshold_is_identity() {
        let d = array![[1.0, -2.0], [0.0, 0.0], [3.5, 1e-300]];
        assert_eq!(prox_group(d.view(), 0.0).unwrap(), d);
    }

    #[test]
    fn three_four_row() {
        let out = prox_group(array![[3.0f64, 4.0]].view(), 1.0).unwrap();
        assert!((out[[0, 0]] - 2.4).abs() < 1e-15);
        assert!((out[[0, 1]] - 3.2).abs() < 1e-15);
    }

    #[test]
    fn boundary_row_is_zeroed() {
        let out = prox_group(array![[3.0f64, 4.0], [6.0, 8.0]].view(), 5.0).unwrap();
        assert_eq!(out.row(0).to_vec(), vec![0.0, 0.0]);
        assert!((out[[1, 0]] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn negative_threshold_rejected() {
        assert!(prox_group(array![[1.0]].view(), -1.0).is_err());
    }

    proptest! {
        #[test]
        fn non_expansive(a in proptest::collection::vec(-5.0f64..5.0, 12),
                         b in proptest::collection::vec(-5.0f64..5.0, 12),
                         t in 0.0f64..6.0) {
            let a = Array2::from_shape_vec((4, 3), a).unwrap();
            let b = Array2::from_shape_vec((4, 3), b).unwrap();
            let pa = prox_group(a.view(), t).unwrap();
            let pb = prox_group(b.view(), t).unwrap();
            prop_assert!(frobenius_diff(pa.view(), pb.view()) <= frobenius_diff(a.view(), b.view()) + 1e-12);
        }

        #[test]
        fn surviving_rows_shrink_by_threshold(a in proptest::collection::vec(-5.0f64..5.0, 12), t in 0.0f64..4.0) {
            let a = Array2::from_shape_vec((4, 3), a).unwrap();
            let pa = prox_group(a.view(), t).unwrap();
            let na = row_norms(a.view());
            let np = row_norms(pa.view());
            for j in 0..4 {
                if na[j] <= t {
                    prop_assert!(pa.row(j).iter().all(|&v| v == 0.0));
                } else {
                    prop_assert!((np[j] - (na[j] - t)).abs() < 1e-12);
                }
            }
        }
    }
}
