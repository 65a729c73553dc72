//! Sparse gradient learning (SGL).
//!
//! Learns the gradient of a regression or classification function in a
//! reproducing kernel Hilbert space under a group penalty that zeroes whole
//! partial derivatives. The surviving rows give a nonlinear variable
//! selection; their Gram matrix gives sparse effective dimension reduction
//! directions.
//!
//! Every numeric routine is generic over [`Float`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar for the common cases.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod classification;
pub mod cli;
pub mod datagen;
pub mod dataset;
pub mod error;
pub mod lasso;
pub mod numerics;
pub mod problem;
pub mod prox;
pub mod regression;
pub mod scalar;

pub use analysis::{edr_directions, project, segcm, select, EdrResult, SelectionResult};
pub use classification::{
    fit_classification, loo_error, ClassFitReport, ClassModel, ClassificationConfig,
    ClassificationProblem, LooOutcome,
};
pub use datagen::{SyntheticModel, SyntheticSpec};
pub use dataset::{Dataset, Task};
pub use error::{Result, SglError};
pub use lasso::{lasso_fit, lasso_lambda_max, lasso_path, LassoConfig, LassoFit, LassoTarget};
pub use numerics::{Bandwidth, KernelKind, KernelSpec, WeightKind, WeightSpec};
pub use problem::{Precomputed, Reduction};
pub use prox::prox_group;
pub use regression::{
    fit, CardinalityFit, CoefficientMatrix, FitReport, PathPoint, RegressionConfig,
    RegressionProblem, StepSize,
};
pub use scalar::Float;

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type RegressionConfig64 = RegressionConfig<f64>;
pub type RegressionConfig32 = RegressionConfig<f32>;
pub type RegressionProblem64 = RegressionProblem<f64>;
pub type RegressionProblem32 = RegressionProblem<f32>;
pub type ClassificationConfig64 = ClassificationConfig<f64>;
pub type ClassificationConfig32 = ClassificationConfig<f32>;
pub type ClassificationProblem64 = ClassificationProblem<f64>;
pub type ClassificationProblem32 = ClassificationProblem<f32>;
pub type CoefficientMatrix64 = CoefficientMatrix<f64>;
pub type CoefficientMatrix32 = CoefficientMatrix<f32>;
pub type ClassModel64 = ClassModel<f64>;
pub type EdrResult64 = EdrResult<f64>;
pub type LassoFit64 = LassoFit<f64>;
