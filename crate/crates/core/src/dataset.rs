use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Result};
use crate::scalar::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Regression,
    Classification,
}

/// Samples in rows, variables in columns, plus one response per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<F> {
    x: Array2<F>,
    y: Array1<F>,
    task: Task,
}

impl<F: Float> Dataset<F> {
    pub fn new(x: Array2<F>, y: Array1<F>, task: Task) -> Result<Self> {
        let (n, p) = x.dim();
        if n < 2 {
            return invalid(format!("need at least 2 samples, got {n}"));
        }
        if p < 1 {
            return invalid("need at least one variable");
        }
        if y.len() != n {
            return invalid(format!("response has length {}, expected {n}", y.len()));
        }
        if let Some(((i, j), _)) = x.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return invalid(format!("non-finite sample value at ({i}, {j})"));
        }
        if let Some((i, _)) = y.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return invalid(format!("non-finite response at sample {i}"));
        }
        if task == Task::Classification {
            let mut pos = 0usize;
            for (i, &v) in y.iter().enumerate() {
                if v == F::one() {
                    pos += 1;
                } else if v != -F::one() {
                    return invalid(format!("label {v} at sample {i} is not -1 or +1"));
                }
            }
            if pos == 0 || pos == n {
                return invalid("classification data must contain both classes");
            }
        }
        Ok(Self { x, y, task })
    }

    pub fn regression(x: Array2<F>, y: Array1<F>) -> Result<Self> {
        Self::new(x, y, Task::Regression)
    }

    pub fn classification(x: Array2<F>, y: Array1<F>) -> Result<Self> {
        Self::new(x, y, Task::Classification)
    }

    pub fn x(&self) -> ArrayView2<'_, F> {
        self.x.view()
    }

    pub fn y(&self) -> ArrayView1<'_, F> {
        self.y.view()
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn n_samples(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_vars(&self) -> usize {
        self.x.ncols()
    }

    pub fn sample(&self, i: usize) -> ArrayView1<'_, F> {
        self.x.row(i)
    }

    /// Subset of samples in the given order. Fails if the subset is not a valid dataset.
    pub fn select_samples(&self, idx: &[usize]) -> Result<Self> {
        Self::new(
            self.x.select(Axis(0), idx),
            self.y.select(Axis(0), idx),
            self.task,
        )
    }

    /// Reorders variables: column `k` of the result is column `perm[k]` of `self`.
    pub fn permute_vars(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n_vars() {
            return invalid("permutation length differs from variable count");
        }
        Self::new(self.x.select(Axis(1), perm), self.y.clone(), self.task)
    }

    /// Same data with every variable shifted to zero mean. The response is untouched.
    pub fn centered(&self) -> Self {
        let means = self.x.mean_axis(Axis(0)).expect("n >= 2");
        Self {
            x: &self.x - &means,
            y: self.y.clone(),
            task: self.task,
        }
    }

    pub fn into_parts(self) -> (Array2<F>, Array1<F>, Task) {
        (self.x, self.y, self.task)
    }

    pub fn cast<G: Float>(&self) -> Dataset<G> {
        Dataset {
            x: self.x.mapv(|v| G::lit(v.to_f64_lossy())),
            y: self.y.mapv(|v| G::lit(v.to_f64_lossy())),
            task: self.task,
        }
    }

    /// SHA-256 over the shape, task and the little-endian f64 bytes of every value.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n_samples() as u64).to_le_bytes());
        h.update((self.n_vars() as u64).to_le_bytes());
        h.update([matches!(self.task, Task::Classification) as u8]);
        for v in self.x.iter().chain(self.y.iter()) {
            h.update(v.to_f64_lossy().to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(Dataset::regression(array![[1.0]], array![1.0]).is_err());
        assert!(Dataset::regression(array![[1.0], [2.0]], array![1.0]).is_err());
        assert!(Dataset::regression(array![[1.0], [f64::NAN]], array![1.0, 2.0]).is_err());
        assert!(Dataset::regression(array![[1.0], [2.0]], array![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn classification_labels_checked() {
        assert!(Dataset::classification(array![[1.0], [2.0]], array![1.0, 0.0]).is_err());
        assert!(Dataset::classification(array![[1.0], [2.0]], array![1.0, 1.0]).is_err());
        assert!(Dataset::classification(array![[1.0], [2.0]], array![1.0, -1.0]).is_ok());
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = Dataset::regression(array![[1.0], [2.0]], array![1.0, 2.0]).unwrap();
        let b = Dataset::regression(array![[1.0], [2.0]], array![1.0, 2.5]).unwrap();
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
    }

    #[test]
    fn centering() {
        let d = Dataset::regression(array![[1.0, 4.0], [3.0, 4.0]], array![1.0, 2.0]).unwrap();
        let c = d.centered();
        assert_eq!(c.x(), array![[-1.0, 0.0], [1.0, 0.0]]);
        assert_eq!(c.y(), d.y());
    }
}
