//! Dense symmetric eigendecomposition and thin SVD, both by Jacobi rotations.
//!
//! Jacobi methods are slower than Householder/QR pipelines but give high
//! relative accuracy and work for any [`Float`] without a LAPACK backend.
//! Sizes here are bounded by the sample count, which is assumed modest.

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Result, SglError};
use crate::scalar::Float;

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<F> {
    pub values: Array1<F>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: Array2<F>,
}

/// Cyclic Jacobi eigendecomposition. Only the upper triangle is trusted;
/// the input is symmetrized first.
pub fn symmetric_eigen<F: Float>(a: ArrayView2<F>) -> Result<SymmetricEigen<F>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(SglError::InvalidInput(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let half = F::lit(0.5);
    let mut m = Array2::from_shape_fn((n, n), |(i, j)| (a[[i, j]] + a[[j, i]]) * half);
    if m.iter().any(|v| !v.is_finite()) {
        return Err(SglError::Numerical(
            "non-finite entry in symmetric matrix".into(),
        ));
    }
    let mut v = Array2::<F>::eye(n);
    let total: F = m.iter().map(|&x| x * x).sum::<F>();
    let tiny = F::epsilon() * F::epsilon() * total;

    let mut converged = n < 2 || total == F::zero();
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut off = F::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += m[[p, q]] * m[[p, q]];
            }
        }
        if off <= tiny {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                if apq == F::zero() {
                    continue;
                }
                let app = m[[p, p]];
                let aqq = m[[q, q]];
                let theta = (aqq - app) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + F::one()).sqrt());
                let t = if theta == F::zero() { F::one() } else { t };
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                m[[p, q]] = F::zero();
                m[[q, p]] = F::zero();
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(SglError::Numerical(
            "Jacobi eigendecomposition did not converge".into(),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[[j, j]]
            .partial_cmp(&m[[i, i]])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let vectors = v.select(Axis(1), &order);
    Ok(SymmetricEigen { values, vectors })
}

/// Thin SVD `a = u · diag(sigma) · vᵀ` with `k = a.ncols()` singular triplets,
/// sorted by descending singular value.
#[derive(Debug, Clone)]
pub struct ThinSvd<F> {
    /// `m × k`. Columns belonging to zero singular values are completed to an
    /// orthonormal set when `k ≤ m`; otherwise they are left zero.
    pub u: Array2<F>,
    pub sigma: Array1<F>,
    /// `k × k` orthogonal.
    pub v: Array2<F>,
}

/// One-sided (Hestenes) Jacobi SVD of an `m × k` matrix. Orthogonalizes the
/// columns in place, so left singular vectors stay orthogonal to working
/// precision even for tiny singular values.
pub fn thin_svd<F: Float>(a: ArrayView2<F>) -> Result<ThinSvd<F>> {
    let (m, k) = a.dim();
    if a.iter().any(|v| !v.is_finite()) {
        return Err(SglError::Numerical("non-finite entry in SVD input".into()));
    }
    let mut w = a.to_owned();
    let mut v = Array2::<F>::eye(k);
    let eps = F::epsilon();
    // Columns whose squared norm falls below this are numerically zero;
    // rotating them only churns roundoff.
    let scale = a.iter().map(|&x| x * x).sum::<F>();
    let negligible = scale * eps * eps;

    let mut converged = k < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let (mut alpha, mut beta, mut gamma) = (F::zero(), F::zero(), F::zero());
                for r in 0..m {
                    let wp = w[[r, p]];
                    let wq = w[[r, q]];
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if gamma == F::zero()
                    || alpha <= negligible
                    || beta <= negligible
                    || gamma.abs() <= eps * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = if zeta == F::zero() {
                    F::one()
                } else {
                    zeta.signum() / (zeta.abs() + (F::one() + zeta * zeta).sqrt())
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = c * t;
                for r in 0..m {
                    let wp = w[[r, p]];
                    let wq = w[[r, q]];
                    w[[r, p]] = c * wp - s * wq;
                    w[[r, q]] = s * wp + c * wq;
                }
                for r in 0..k {
                    let vp = v[[r, p]];
                    let vq = v[[r, q]];
                    v[[r, p]] = c * vp - s * vq;
                    v[[r, q]] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(SglError::Numerical(
            "one-sided Jacobi SVD did not converge".into(),
        ));
    }

    let norms: Vec<F> = (0..k)
        .map(|j| w.column(j).iter().map(|&x| x * x).sum::<F>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        norms[j]
            .partial_cmp(&norms[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let smax = order.first().map(|&i| norms[i]).unwrap_or(F::zero());
    let cutoff = smax * eps * F::from_usize_lossy(m.max(k));

    let mut u = Array2::<F>::zeros((m, k));
    let mut sigma = Array1::<F>::zeros(k);
    let mut filled = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        if s > cutoff && s > F::zero() {
            sigma[dst] = s;
            let col = w.column(src).mapv(|x| x / s);
            u.column_mut(dst).assign(&col);
            filled.push(dst);
        }
    }
    let v = v.select(Axis(1), &order);
    complete_orthonormal(&mut u, &filled);
    Ok(ThinSvd { u, sigma, v })
}

/// Fills the columns of `u` not listed in `filled` with unit vectors orthogonal
/// to all others (Gram–Schmidt on the standard basis, two passes).
fn complete_orthonormal<F: Float>(u: &mut Array2<F>, filled: &[usize]) {
    let (m, k) = u.dim();
    let mut basis: Vec<usize> = filled.to_vec();
    let mut candidate = 0usize;
    for j in 0..k {
        if filled.contains(&j) {
            continue;
        }
        while candidate < m {
            let mut e = Array1::<F>::zeros(m);
            e[candidate] = F::one();
            candidate += 1;
            for _ in 0..2 {
                for &b in &basis {
                    let col = u.column(b);
                    let d = col.dot(&e);
                    e.scaled_add(-d, &col);
                }
            }
            let norm = e.dot(&e).sqrt();
            if norm > F::lit(0.5) {
                u.column_mut(j).assign(&e.mapv(|x| x / norm));
                basis.push(j);
                break;
            }
        }
    }
}

/// Square root and pseudo-inverse square root of a PSD matrix.
#[derive(Debug, Clone)]
pub struct PsdSqrt<F> {
    pub half: Array2<F>,
    pub half_pinv: Array2<F>,
    pub eigenvalues: Array1<F>,
}

/// Eigenvalues below this fraction of the largest are treated as zero.
pub const EIG_CLAMP: f64 = 1e-12;
/// Negative eigenvalues beyond this fraction of the largest reject the matrix.
pub const NEGATIVE_TOLERANCE: f64 = 1e-6;

pub fn psd_sqrt<F: Float>(k: ArrayView2<F>) -> Result<PsdSqrt<F>> {
    let n = k.nrows();
    let eig = symmetric_eigen(k)?;
    let lmax = eig.values.iter().fold(F::zero(), |acc, &l| acc.max(l));
    if let Some(&lmin) = eig.values.iter().last() {
        if lmin < -F::lit(NEGATIVE_TOLERANCE) * lmax || (lmax == F::zero() && lmin < F::zero()) {
            return Err(SglError::Numerical(format!(
                "matrix is not positive semidefinite: eigenvalue {lmin} (largest {lmax})"
            )));
        }
    }
    let clamp = F::lit(EIG_CLAMP) * lmax;
    let mut half = Array2::<F>::zeros((n, n));
    let mut half_pinv = Array2::<F>::zeros((n, n));
    for (idx, &l) in eig.values.iter().enumerate() {
        if l <= clamp || l <= F::zero() {
            continue;
        }
        let q = eig.vectors.column(idx);
        let r = l.sqrt();
        let ri = F::one() / r;
        for i in 0..n {
            for j in 0..n {
                let qq = q[i] * q[j];
                half[[i, j]] += r * qq;
                half_pinv[[i, j]] += ri * qq;
            }
        }
    }
    symmetrize(&mut half);
    symmetrize(&mut half_pinv);
    Ok(PsdSqrt {
        half,
        half_pinv,
        eigenvalues: eig.values,
    })
}

pub(crate) fn symmetrize<F: Float>(a: &mut Array2<F>) {
    let n = a.nrows();
    let half = F::lit(0.5);
    for i in 0..n {
        for j in i + 1..n {
            let m = (a[[i, j]] + a[[j, i]]) * half;
            a[[i, j]] = m;
            a[[j, i]] = m;
        }
    }
}

pub(crate) fn frobenius<F: Float>(a: ArrayView2<F>) -> F {
    a.iter().map(|&x| x * x).sum::<F>().sqrt()
}
