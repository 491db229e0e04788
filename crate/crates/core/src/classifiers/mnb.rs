//! Multinomial naive Bayes with additive smoothing, scored in log space.

use super::ClassifierError;
use crate::vectorize::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MnbParams {
    /// Additive smoothing; must be positive.
    pub alpha: f64,
}

impl Default for MnbParams {
    fn default() -> Self {
        MnbParams { alpha: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialNb {
    pub(crate) params: MnbParams,
    /// `ln(n_c / n)` per class.
    pub(crate) log_prior: Vec<f64>,
    /// `ln((count(w,c) + alpha) / (sum_w' count(w',c) + alpha * |V|))`,
    /// indexed `[class][feature]`.
    pub(crate) log_likelihood: Vec<Vec<f64>>,
}

impl MultinomialNb {
    pub fn fit(matrix: &FeatureMatrix, params: &MnbParams) -> Result<Self, ClassifierError> {
        if !(params.alpha > 0.0 && params.alpha.is_finite()) {
            return Err(ClassifierError::Hyperparameter(format!(
                "smoothing alpha must be positive, got {}",
                params.alpha
            )));
        }
        let k = matrix.num_classes();
        let d = matrix.width();
        let mut counts = vec![vec![0.0f64; d]; k];
        for (row, &label) in matrix.rows().iter().zip(matrix.labels()) {
            for (f, v) in row.iter() {
                if v < 0.0 {
                    return Err(ClassifierError::Data(format!(
                        "multinomial naive Bayes needs non-negative weights, feature {f} has {v}"
                    )));
                }
                counts[label][f] += v;
            }
        }
        let class_counts = matrix.class_counts();
        if let Some(c) = class_counts.iter().position(|&n| n == 0) {
            return Err(ClassifierError::EmptyClass(matrix.class_values()[c].clone()));
        }
        let n = matrix.len() as f64;
        let log_prior = class_counts
            .iter()
            .map(|&nc| libm::log(nc as f64 / n))
            .collect();
        let log_likelihood = counts
            .iter()
            .map(|class_counts| {
                let total: f64 = class_counts.iter().sum();
                let denom = total + params.alpha * d as f64;
                class_counts
                    .iter()
                    .map(|&c| libm::log((c + params.alpha) / denom))
                    .collect()
            })
            .collect();
        Ok(MultinomialNb {
            params: *params,
            log_prior,
            log_likelihood,
        })
    }

    pub fn params(&self) -> &MnbParams {
        &self.params
    }

    pub fn log_prior(&self) -> &[f64] {
        &self.log_prior
    }

    pub fn log_likelihood(&self) -> &[Vec<f64>] {
        &self.log_likelihood
    }

    /// `ln P(c) + sum_i x_i ln P(w_i | c)` per class.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> Vec<f64> {
        self.log_prior
            .iter()
            .zip(&self.log_likelihood)
            .map(|(&lp, ll)| {
                lp + x
                    .iter()
                    .zip(ll)
                    .filter(|(xi, _)| **xi != 0.0)
                    .map(|(xi, l)| xi * l)
                    .sum::<f64>()
            })
            .collect()
    }

    /// Posterior class probabilities (log-sum-exp normalized).
    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        let joint = self.joint_log_likelihood(x);
        let max = joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = joint.iter().map(|j| libm::exp(j - max)).collect();
        let z: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / z).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::argmax;

    fn matrix(rows: &[Vec<f64>], labels: Vec<usize>) -> FeatureMatrix {
        FeatureMatrix::from_dense(rows, labels, ["neg", "pos"]).unwrap()
    }

    #[test]
    fn single_class_is_error() {
        let m = matrix(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![1, 1]);
        assert!(matches!(
            MultinomialNb::fit(&m, &MnbParams::default()),
            Err(ClassifierError::EmptyClass(c)) if c == "neg"
        ));
    }

    #[test]
    fn zero_vector_predicts_prior() {
        let m = matrix(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 2.0]], vec![0, 1, 1]);
        let nb = MultinomialNb::fit(&m, &MnbParams::default()).unwrap();
        let p = nb.probabilities(&[0.0, 0.0]);
        assert!((p[1] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(argmax(&p), 1);
    }

    #[test]
    fn rejects_bad_alpha_and_negative_weights() {
        let m = matrix(&[vec![1.0], vec![2.0]], vec![0, 1]);
        assert!(MultinomialNb::fit(&m, &MnbParams { alpha: 0.0 }).is_err());
        let neg = matrix(&[vec![-1.0], vec![2.0]], vec![0, 1]);
        assert!(matches!(
            MultinomialNb::fit(&neg, &MnbParams::default()),
            Err(ClassifierError::Data(_))
        ));
    }

    #[test]
    fn likelihood_rows_are_distributions() {
        let m = matrix(&[vec![3.0, 1.0, 0.0], vec![0.0, 1.0, 5.0]], vec![0, 1]);
        let nb = MultinomialNb::fit(&m, &MnbParams { alpha: 0.5 }).unwrap();
        for row in nb.log_likelihood() {
            let total: f64 = row.iter().map(|l| l.exp()).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
