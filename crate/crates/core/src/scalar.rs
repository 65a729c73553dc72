//! Scalar abstraction shared by every numeric routine in the crate.

use ndarray::NdFloat;
use num_traits::FromPrimitive;

/// Floating point scalar usable by the solvers. Implemented for `f32` and `f64`.
pub trait Float: NdFloat + FromPrimitive + std::iter::Sum {
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal representable in scalar type")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl<T> Float for T where T: NdFloat + FromPrimitive + std::iter::Sum {}
