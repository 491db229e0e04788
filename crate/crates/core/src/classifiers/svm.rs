//! Linear soft-margin SVM trained by stochastic subgradient descent on
//!
//! ```text
//! lambda/2 * |w|^2 + 1/n * sum_i max(0, 1 - y_i (w.x_i + b))
//! ```
//!
//! with step `1 / (lambda * t)` (Pegasos). Classes map to `y = -1` (index 0)
//! and `y = +1` (index 1). Each epoch visits the instances in a fresh order
//! drawn from the seeded stream. The bias is updated like a weight on a
//! constant feature, shrink included: left unshrunk, its `1 / (lambda * t)`
//! steps keep it oscillating far from the optimum when `lambda` is small.
//! The objective above, which does not penalize `b`, is what
//! [`objective`] reports.
//!
//! The returned model is the running average of the iterates over the
//! second half of all steps. The last iterate alone jumps by up to
//! `|x| / (lambda * t)` per step, which on small sets leaves it well above
//! the optimum.

use super::ClassifierError;
use crate::rng::SplitMix64;
use crate::vectorize::{FeatureMatrix, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            lambda: 1e-3,
            epochs: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvm {
    pub(crate) params: SvmParams,
    pub(crate) weights: Vec<f64>,
    pub(crate) bias: f64,
}

fn sign(label: usize) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

fn sparse_dot(w: &[f64], x: &SparseVector) -> f64 {
    x.iter().map(|(i, v)| w[i] * v).sum()
}

/// Primal objective of `(weights, bias)` on `matrix`.
pub fn objective(matrix: &FeatureMatrix, lambda: f64, weights: &[f64], bias: f64) -> f64 {
    let reg = 0.5 * lambda * weights.iter().map(|w| w * w).sum::<f64>();
    let hinge: f64 = matrix
        .rows()
        .iter()
        .zip(matrix.labels())
        .map(|(x, &l)| (1.0 - sign(l) * (sparse_dot(weights, x) + bias)).max(0.0))
        .sum();
    reg + hinge / matrix.len() as f64
}

impl LinearSvm {
    pub fn fit(matrix: &FeatureMatrix, params: &SvmParams, seed: u64) -> Result<Self, ClassifierError> {
        Ok(Self::fit_traced(matrix, params, seed)?.0)
    }

    /// Also returns the full-data objective of the current (unaveraged)
    /// iterate before training and after each epoch.
    pub fn fit_traced(matrix: &FeatureMatrix, params: &SvmParams, seed: u64) -> Result<(Self, Vec<f64>), ClassifierError> {
        if !(params.lambda > 0.0 && params.lambda.is_finite()) {
            return Err(ClassifierError::Hyperparameter(format!(
                "lambda must be positive, got {}",
                params.lambda
            )));
        }
        if params.epochs == 0 {
            return Err(ClassifierError::Hyperparameter("epochs must be at least 1".into()));
        }
        let lambda = params.lambda;
        let mut rng = SplitMix64::new(seed);
        let mut w = vec![0.0; matrix.width()];
        let mut b = 0.0;
        let mut order: Vec<usize> = (0..matrix.len()).collect();
        let mut objectives = vec![objective(matrix, lambda, &w, b)];
        let mut t = 0u64;
        let average_from = (matrix.len() as u64 * params.epochs as u64) / 2;
        let mut avg_w = vec![0.0; matrix.width()];
        let mut avg_b = 0.0;
        let mut averaged = 0.0;
        for _ in 0..params.epochs {
            rng.shuffle(&mut order);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (lambda * t as f64);
                let x = matrix.row(i);
                let y = sign(matrix.labels()[i]);
                let margin = y * (sparse_dot(&w, x) + b);
                let shrink = 1.0 - eta * lambda;
                for wj in &mut w {
                    *wj *= shrink;
                }
                b *= shrink;
                if margin < 1.0 {
                    for (j, v) in x.iter() {
                        w[j] += eta * y * v;
                    }
                    b += eta * y;
                }
                if t > average_from {
                    averaged += 1.0;
                    for (a, wj) in avg_w.iter_mut().zip(&w) {
                        *a += (wj - *a) / averaged;
                    }
                    avg_b += (b - avg_b) / averaged;
                }
            }
            objectives.push(objective(matrix, lambda, &w, b));
        }
        Ok((
            LinearSvm {
                params: *params,
                weights: avg_w,
                bias: avg_b,
            },
            objectives,
        ))
    }

    pub fn params(&self) -> &SvmParams {
        &self.params
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// `w.x + b`.
    pub fn decision_value(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn objective(&self, matrix: &FeatureMatrix) -> f64 {
        objective(matrix, self.params.lambda, &self.weights, self.bias)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_pair() {
        let m = FeatureMatrix::from_dense(&[vec![-1.0], vec![1.0]], vec![0, 1], ["neg", "pos"]).unwrap();
        let svm = LinearSvm::fit(&m, &SvmParams { lambda: 0.01, epochs: 200 }, 1).unwrap();
        let at_neg = svm.decision_value(&[-1.0]);
        let at_pos = svm.decision_value(&[1.0]);
        let at_zero = svm.decision_value(&[0.0]);
        assert!(at_neg < 0.0 && at_pos > 0.0);
        assert!(at_zero.abs() < at_neg.abs() && at_zero.abs() < at_pos.abs());
    }

    #[test]
    fn single_label_drifts_to_that_label() {
        let m = FeatureMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 2.0], vec![1.0, 1.0]], vec![1, 1, 1], ["neg", "pos"])
            .unwrap();
        let (svm, objectives) = LinearSvm::fit_traced(&m, &SvmParams { lambda: 0.1, epochs: 50 }, 3).unwrap();
        for i in 0..3 {
            assert!(svm.decision_value(&m.dense_row(i)) > 0.0);
        }
        assert!(objectives.last().unwrap() < &objectives[0]);
    }

    #[test]
    fn rejects_bad_params() {
        let m = FeatureMatrix::from_dense(&[vec![1.0], vec![-1.0]], vec![1, 0], ["neg", "pos"]).unwrap();
        assert!(LinearSvm::fit(&m, &SvmParams { lambda: 0.0, epochs: 1 }, 0).is_err());
        assert!(LinearSvm::fit(&m, &SvmParams { lambda: 1.0, epochs: 0 }, 0).is_err());
    }
}
