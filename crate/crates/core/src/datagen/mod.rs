//! Synthetic benchmark datasets and the CSV loader.
//!
//! All generators draw from `ChaCha20Rng::seed_from_u64(seed)` in a fixed
//! order (sample by sample, variable by variable), so a seed reproduces the
//! same dataset bit for bit on every platform.

mod csv_io;

pub use csv_io::{
    load_csv, normalize_split, read_csv, write_csv, CsvSchema, LabelCoding, Normalization,
};

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{invalid, Result};
use crate::scalar::Float;

pub const TURLACH_NOISE_VARIANCE: f64 = 0.05;
pub const SPHERE_INNER_RADIUS: f64 = 3.0;
pub const SPHERE_OUTER_RADIUS: f64 = 3.0 * 2.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SyntheticModel {
    /// `y = (2x¹ - 1)² + x² + x³ + x⁴ + x⁵ + ε`, all `x^j ~ U[0, 1]`.
    TurlachRegression,
    /// Class `+1` on the circle of radius 3 and class `-1` on radius 7.5 in
    /// the first two coordinates; remaining coordinates are `N(0, σ²)` noise.
    TwoSpheresClassification,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SyntheticSpec {
    pub model: SyntheticModel,
    pub n: usize,
    pub p: usize,
    /// Standard deviation of `ε` (Turlach) or of the noise coordinates (spheres).
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// `n = 100`, `p = 10`, noise variance 0.05.
    pub fn turlach(seed: u64) -> Self {
        Self {
            model: SyntheticModel::TurlachRegression,
            n: 100,
            p: 10,
            noise_sigma: TURLACH_NOISE_VARIANCE.sqrt(),
            seed,
        }
    }

    /// `n = 40`, `p = 200`.
    pub fn two_spheres(sigma: f64, seed: u64) -> Self {
        Self {
            model: SyntheticModel::TwoSpheresClassification,
            n: 40,
            p: 200,
            noise_sigma: sigma,
            seed,
        }
    }

    pub fn with_size(self, n: usize, p: usize) -> Self {
        Self { n, p, ..self }
    }

    pub fn generate<F: Float>(&self) -> Result<Dataset<F>> {
        match self.model {
            SyntheticModel::TurlachRegression => gen_turlach(self),
            SyntheticModel::TwoSpheresClassification => gen_two_spheres(self),
        }
    }
}

/// Noise-free Turlach response for one sample (first five coordinates).
pub fn turlach_mean(x: &[f64]) -> f64 {
    (2.0 * x[0] - 1.0).powi(2) + x[1] + x[2] + x[3] + x[4]
}

/// True gradient of [`turlach_mean`] over `p` variables.
pub fn turlach_gradient(x: &[f64], p: usize) -> Vec<f64> {
    let mut g = vec![0.0; p];
    g[0] = 4.0 * (2.0 * x[0] - 1.0);
    g[1..5].fill(1.0);
    g
}

fn normal(sigma: f64) -> Result<Option<Normal<f64>>> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return invalid(format!(
            "noise sigma must be finite and nonnegative, got {sigma}"
        ));
    }
    Ok(if sigma > 0.0 {
        Some(Normal::new(0.0, sigma).expect("valid normal"))
    } else {
        None
    })
}

pub fn gen_turlach<F: Float>(spec: &SyntheticSpec) -> Result<Dataset<F>> {
    if spec.p < 5 {
        return invalid(format!("Turlach model needs p >= 5, got {}", spec.p));
    }
    let noise = normal(spec.noise_sigma)?;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut x = Array2::<f64>::zeros((spec.n, spec.p));
    let mut y = Array1::<f64>::zeros(spec.n);
    for i in 0..spec.n {
        for j in 0..spec.p {
            x[[i, j]] = rng.random::<f64>();
        }
        let eps = noise.map(|d| d.sample(&mut rng)).unwrap_or(0.0);
        y[i] = turlach_mean(x.row(i).as_slice().expect("row-major")) + eps;
    }
    Dataset::regression(x.mapv(F::lit), y.mapv(F::lit))
}

pub fn gen_two_spheres<F: Float>(spec: &SyntheticSpec) -> Result<Dataset<F>> {
    if spec.p < 2 {
        return invalid(format!("two-spheres model needs p >= 2, got {}", spec.p));
    }
    if spec.n % 2 == 1 || spec.n == 0 {
        return invalid(format!("two-spheres model needs an even n, got {}", spec.n));
    }
    let noise = normal(spec.noise_sigma)?;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let half = spec.n / 2;
    let mut x = Array2::<f64>::zeros((spec.n, spec.p));
    let mut y = Array1::<f64>::zeros(spec.n);
    for i in 0..spec.n {
        let (radius, label) = if i < half {
            (SPHERE_INNER_RADIUS, 1.0)
        } else {
            (SPHERE_OUTER_RADIUS, -1.0)
        };
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        x[[i, 0]] = radius * theta.cos();
        x[[i, 1]] = radius * theta.sin();
        for j in 2..spec.p {
            x[[i, j]] = noise.map(|d| d.sample(&mut rng)).unwrap_or(0.0);
        }
        y[i] = label;
    }
    Dataset::classification(x.mapv(F::lit), y.mapv(F::lit))
}
