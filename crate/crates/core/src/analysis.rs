//! Post-fit analysis of a coefficient matrix `C̃`: the selected variables,
//! the sparse gradient covariance `Ξ = C̃ C̃ᵀ`, and its leading eigenvectors
//! (sparse EDR directions).

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::numerics::thin_svd;
use crate::prox::row_norms;
use crate::scalar::Float;

/// Eigenvalues below this fraction of the largest count as zero when
/// choosing the default number of directions.
pub const EIGEN_REL_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult<F> {
    /// Zero-based indices of variables with a nonzero gradient row, ascending.
    pub selected: Vec<usize>,
    /// `‖c̃^j‖₂ = ‖f^j‖_K` for every variable.
    pub row_norms: Array1<F>,
}

pub fn select<F: Float>(c_tilde: ArrayView2<F>) -> SelectionResult<F> {
    let norms = row_norms(c_tilde);
    let selected = c_tilde
        .rows()
        .into_iter()
        .enumerate()
        .filter(|(_, r)| r.iter().any(|&v| v != F::zero()))
        .map(|(j, _)| j)
        .collect();
    SelectionResult {
        selected,
        row_norms: norms,
    }
}

/// Sparse empirical gradient covariance `Ξ_ij = ⟨c̃^i, c̃^j⟩`.
pub fn segcm<F: Float>(c_tilde: ArrayView2<F>) -> Array2<F> {
    let mut xi = c_tilde.dot(&c_tilde.t());
    crate::numerics::linalg::symmetrize(&mut xi);
    xi
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdrResult<F> {
    /// Descending eigenvalues of `Ξ` for the returned directions.
    pub eigenvalues: Array1<F>,
    /// All nonzero eigenvalues of `Ξ`, descending.
    pub spectrum: Array1<F>,
    /// `p × d`, orthonormal columns, exact zeros outside the selected rows.
    pub directions: Array2<F>,
    /// Variables with a nonzero loading in some returned direction.
    pub support: Vec<usize>,
    /// Set when fewer directions than requested were available.
    pub truncated: bool,
}

impl<F: Float> EdrResult<F> {
    pub fn dim(&self) -> usize {
        self.directions.ncols()
    }
}

/// Leading eigenvectors of `Ξ`, from the SVD of the selected rows of `C̃`.
/// `d = None` keeps every eigenvalue above `1e-8` of the largest.
///
/// Each direction is signed so that its largest-magnitude loading is
/// positive (lowest index on ties).
pub fn edr_directions<F: Float>(c_tilde: ArrayView2<F>, d: Option<usize>) -> Result<EdrResult<F>> {
    let p = c_tilde.nrows();
    if let Some(d) = d {
        if d == 0 || d > p {
            return invalid(format!("number of directions must be in [1, {p}], got {d}"));
        }
    }
    let sel = select(c_tilde).selected;
    let sub = c_tilde.select(Axis(0), &sel);
    // Left singular vectors of the |S| × n block are the right singular
    // vectors of its transpose.
    let (values, vecs) = if sel.is_empty() {
        (Array1::zeros(0), Array2::zeros((0, 0)))
    } else {
        let svd = thin_svd(sub.t())?;
        (svd.sigma.mapv(|s| s * s), svd.v)
    };
    let top = values.iter().fold(F::zero(), |a, &b| a.max(b));
    let cutoff = F::lit(EIGEN_REL_CUTOFF) * top;
    let nonzero = values
        .iter()
        .take_while(|&&v| v > cutoff && v > F::zero())
        .count();
    let spectrum = values.slice(ndarray::s![..nonzero]).to_owned();
    let want = d.unwrap_or(nonzero);
    let k = want.min(nonzero);

    let mut directions = Array2::<F>::zeros((p, k));
    for col in 0..k {
        let v = vecs.column(col);
        let mut lead = 0usize;
        for (idx, &x) in v.iter().enumerate() {
            if x.abs() > v[lead].abs() {
                lead = idx;
            }
        }
        let sign = if v[lead] < F::zero() {
            -F::one()
        } else {
            F::one()
        };
        for (idx, &row) in sel.iter().enumerate() {
            directions[[row, col]] = sign * v[idx];
        }
    }
    let support = (0..p)
        .filter(|&j| directions.row(j).iter().any(|&x| x != F::zero()))
        .collect();
    Ok(EdrResult {
        eigenvalues: values.slice(ndarray::s![..k]).to_owned(),
        spectrum,
        directions,
        support,
        truncated: k < want,
    })
}

/// Coordinates of samples (rows of `x`) along the EDR directions.
pub fn project<F: Float>(x: ArrayView2<F>, edr: &EdrResult<F>) -> Result<Array2<F>> {
    if x.ncols() != edr.directions.nrows() {
        return invalid(format!(
            "samples have {} variables, directions have {}",
            x.ncols(),
            edr.directions.nrows()
        ));
    }
    Ok(x.dot(&edr.directions))
}
