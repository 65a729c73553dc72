//! Kernels, locality weights, and the dense linear algebra both solvers share.

pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod lipschitz;
pub mod weights;

pub use geometry::{difference_matrix, reduced_geometry, ReducedGeometry};
pub use kernel::{kernel_matrix, KernelKind, KernelSpec, ResolvedKernel};
pub use linalg::{psd_sqrt, symmetric_eigen, thin_svd, PsdSqrt, SymmetricEigen, ThinSvd};
pub use lipschitz::{lipschitz_estimate, rayleigh_top_eigenvalue};
pub use weights::{median_bandwidth, weights, Bandwidth, WeightKind, WeightSpec};

/// Square root and Moore–Penrose inverse square root of a Gram matrix.
pub fn kernel_sqrt<F: crate::Float>(
    k: ndarray::ArrayView2<F>,
) -> crate::Result<(ndarray::Array2<F>, ndarray::Array2<F>)> {
    let r = psd_sqrt(k)?;
    Ok((r.half, r.half_pinv))
}
