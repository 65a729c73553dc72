//! Helpers shared by the integration and acceptance tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sgl::Dataset64;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha20Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(lo..hi))
}

/// `y = sin(2x₁) + x₂² + 0.05·noise`; later variables are irrelevant.
pub fn regression_data(n: usize, p: usize, seed: u64) -> Dataset64 {
    let mut r = rng(seed);
    let x = uniform(&mut r, n, p, -1.0, 1.0);
    let y = Array1::from_shape_fn(n, |i| {
        let second = if p > 1 { x[[i, 1]].powi(2) } else { 0.0 };
        (2.0 * x[[i, 0]]).sin() + second + 0.05 * r.random_range(-1.0..1.0)
    });
    Dataset64::regression(x, y).unwrap()
}

/// Labels from the sign of `x₁ + 0.5x₂` with both classes guaranteed present.
pub fn classification_data(n: usize, p: usize, seed: u64) -> Dataset64 {
    let mut r = rng(seed);
    let x = uniform(&mut r, n, p, -1.0, 1.0);
    let mut y = Array1::from_shape_fn(n, |i| {
        let second = if p > 1 { 0.5 * x[[i, 1]] } else { 0.0 };
        if x[[i, 0]] + second > 0.0 {
            1.0
        } else {
            -1.0
        }
    });
    y[0] = 1.0;
    y[1] = -1.0;
    Dataset64::classification(x, y).unwrap()
}

pub fn frob(a: ArrayView2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `‖a - b‖_F / max(‖b‖_F, 1e-300)`.
pub fn rel_err(a: ArrayView2<f64>, b: ArrayView2<f64>) -> f64 {
    frob((&a - &b).view()) / frob(b).max(1e-300)
}

pub fn to_na(a: ArrayView2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Eigenvalues of a symmetric matrix from nalgebra, descending.
pub fn na_eigenvalues(a: ArrayView2<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = to_na(a)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

/// Dense matrix of a linear map on `dim`-vectors, one basis vector at a time.
pub fn dense_operator(
    dim: usize,
    mut apply: impl FnMut(&Array1<f64>) -> Array1<f64>,
) -> Array2<f64> {
    let mut m = Array2::zeros((dim, dim));
    for k in 0..dim {
        let mut e = Array1::zeros(dim);
        e[k] = 1.0;
        m.column_mut(k).assign(&apply(&e));
    }
    m
}

/// Central differences of a scalar function of a matrix.
pub fn fd_matrix(c: &Array2<f64>, f: impl Fn(ArrayView2<f64>) -> f64) -> Array2<f64> {
    let mut g = Array2::zeros(c.dim());
    let mut work = c.clone();
    for idx in ndarray::indices(c.dim()) {
        let h = 1e-5 * c[idx].abs().max(1.0);
        let orig = work[idx];
        work[idx] = orig + h;
        let up = f(work.view());
        work[idx] = orig - h;
        let down = f(work.view());
        work[idx] = orig;
        g[idx] = (up - down) / (2.0 * h);
    }
    g
}

/// Damped Newton on `½‖c−d‖² + t·√(‖c‖²+ε²)` with ε driven to 1e-15.
pub fn generic_row_minimizer(d: ArrayView1<f64>, t: f64) -> Array1<f64> {
    let m = d.len();
    let dv = DVector::from_iterator(m, d.iter().copied());
    let h = |c: &DVector<f64>, eps: f64| {
        0.5 * (c - &dv).norm_squared() + t * (c.norm_squared() + eps * eps).sqrt()
    };
    let mut c = dv.clone();
    let mut eps = 1.0;
    while eps >= 1e-15 {
        for _ in 0..200 {
            let r = (c.norm_squared() + eps * eps).sqrt();
            let grad = &c - &dv + &c * (t / r);
            if grad.norm() <= 1e-15 * (1.0 + dv.norm()) {
                break;
            }
            let hess =
                DMatrix::identity(m, m) * (1.0 + t / r) - (&c * c.transpose()) * (t / r.powi(3));
            let step = hess.cholesky().expect("positive definite").solve(&(-&grad));
            let f0 = h(&c, eps);
            let mut s = 1.0;
            while h(&(&c + &step * s), eps) > f0 + 1e-4 * s * grad.dot(&step) && s > 1e-12 {
                s *= 0.5;
            }
            c += &step * s;
        }
        eps *= 0.1;
    }
    Array1::from_iter(c.iter().copied())
}
