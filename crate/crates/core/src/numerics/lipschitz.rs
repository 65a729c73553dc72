use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Result, SglError};
use crate::scalar::Float;

pub const POWER_MAX_ITER: usize = 200;
pub const POWER_REL_TOL: f64 = 1e-6;
pub const LIPSCHITZ_SAFETY: f64 = 1.01;

/// Largest eigenvalue of a symmetric PSD linear map by power iteration, as
/// the final Rayleigh quotient. Starts from a fixed pseudo-random vector so
/// results are reproducible.
pub fn rayleigh_top_eigenvalue<F: Float>(
    dim: usize,
    mut apply: impl FnMut(&Array1<F>) -> Array1<F>,
) -> Result<F> {
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed_1ee7);
    let mut v: Array1<F> = (0..dim)
        .map(|_| F::lit(rng.random_range(0.5..1.5)))
        .collect();
    normalize(&mut v);
    let mut prev = F::zero();
    let mut rq = F::zero();
    for it in 0..POWER_MAX_ITER {
        let hv = apply(&v);
        rq = v.dot(&hv);
        let norm = hv.dot(&hv).sqrt();
        if !norm.is_finite() {
            return Err(SglError::Numerical("power iteration overflowed".into()));
        }
        if norm == F::zero() {
            return Err(SglError::DegenerateProblem(
                "smooth term has a zero Hessian (all weights zero?)".into(),
            ));
        }
        v = hv.mapv(|x| x / norm);
        if it > 0 && (rq - prev).abs() <= F::lit(POWER_REL_TOL) * rq.abs() {
            break;
        }
        prev = rq;
    }
    Ok(rq)
}

/// Lipschitz estimate: Rayleigh quotient from [`rayleigh_top_eigenvalue`]
/// times a 1% safety factor.
pub fn lipschitz_estimate<F: Float>(
    dim: usize,
    apply: impl FnMut(&Array1<F>) -> Array1<F>,
) -> Result<F> {
    Ok(rayleigh_top_eigenvalue(dim, apply)? * F::lit(LIPSCHITZ_SAFETY))
}

fn normalize<F: Float>(v: &mut Array1<F>) {
    let n = v.dot(v).sqrt();
    if n > F::zero() {
        v.mapv_inplace(|x| x / n);
    }
}
