//! Discrete AdaBoost over weighted decision stumps (two classes).
//!
//! Classes map to `-1` (index 0) and `+1` (index 1). Each round fits the
//! weak tree to the current instance weights, takes its weighted error
//! `eps`, weighs it by `alpha = ln((1 - eps) / eps) / 2`, scales the weights
//! of misclassified instances by `e^alpha` and the rest by `e^-alpha`, then
//! renormalizes. A perfect round gets [`ALPHA_CAP`] and ends training; a
//! round with `eps >= 0.5` is discarded and ends training, except in round
//! one where it is kept alone with weight 1 so the ensemble is never empty.

use super::tree::{DecisionTree, TreeParams};
use super::ClassifierError;
use crate::vectorize::FeatureMatrix;

/// `ln(1e10) / 2`, the weight given to a learner with zero training error.
pub const ALPHA_CAP: f64 = 11.512_925_464_970_229;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdaBoostParams {
    pub rounds: usize,
    pub weak: TreeParams,
}

impl Default for AdaBoostParams {
    fn default() -> Self {
        AdaBoostParams {
            rounds: 10,
            weak: TreeParams::stump(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    RoundsExhausted,
    PerfectLearner,
    WeakLearnerTooWeak,
}

/// Per-round diagnostics from [`AdaBoost::fit_traced`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoostTrace {
    /// Weighted error of each attempted round, including a discarded last one.
    pub errors: Vec<f64>,
    /// Instance weights before round 1 and after each weight update.
    pub weights: Vec<Vec<f64>>,
    /// Training predictions of each attempted round's weak learner.
    pub predictions: Vec<Vec<usize>>,
    pub stop: StopReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaBoost {
    pub(crate) params: AdaBoostParams,
    /// `(weak learner, alpha)` per kept round.
    pub(crate) learners: Vec<(DecisionTree, f64)>,
}

impl AdaBoost {
    pub fn fit(matrix: &FeatureMatrix, params: &AdaBoostParams) -> Result<Self, ClassifierError> {
        Ok(Self::fit_traced(matrix, params)?.0)
    }

    pub fn fit_traced(matrix: &FeatureMatrix, params: &AdaBoostParams) -> Result<(Self, BoostTrace), ClassifierError> {
        if params.rounds == 0 {
            return Err(ClassifierError::Hyperparameter("AdaBoost needs at least one round".into()));
        }
        params.weak.validate()?;
        let n = matrix.len();
        let dense = matrix.to_dense();
        let labels = matrix.labels();
        let mut weights = vec![1.0 / n as f64; n];
        let mut learners = Vec::new();
        let mut trace = BoostTrace {
            errors: Vec::new(),
            weights: vec![weights.clone()],
            predictions: Vec::new(),
            stop: StopReason::RoundsExhausted,
        };
        for round in 0..params.rounds {
            let tree = DecisionTree::fit_weighted(matrix, &weights, &params.weak);
            let preds: Vec<usize> = dense.iter().map(|x| tree.predict(x)).collect();
            let wrong: Vec<bool> = preds.iter().zip(labels).map(|(p, l)| p != l).collect();
            let eps: f64 = weights.iter().zip(&wrong).filter(|(_, w)| **w).map(|(w, _)| w).sum();
            trace.errors.push(eps);
            trace.predictions.push(preds);
            if !wrong.contains(&true) {
                learners.push((tree, ALPHA_CAP));
                trace.stop = StopReason::PerfectLearner;
                break;
            }
            if eps >= 0.5 {
                if round == 0 {
                    learners.push((tree, 1.0));
                }
                trace.stop = StopReason::WeakLearnerTooWeak;
                break;
            }
            let alpha = 0.5 * libm::log((1.0 - eps) / eps);
            let up = libm::exp(alpha);
            let down = libm::exp(-alpha);
            for (w, miss) in weights.iter_mut().zip(&wrong) {
                *w *= if *miss { up } else { down };
            }
            let z: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= z;
            }
            trace.weights.push(weights.clone());
            learners.push((tree, alpha));
        }
        Ok((
            AdaBoost {
                params: *params,
                learners,
            },
            trace,
        ))
    }

    pub fn params(&self) -> &AdaBoostParams {
        &self.params
    }

    pub fn learners(&self) -> &[(DecisionTree, f64)] {
        &self.learners
    }

    /// `sum_t alpha_t * h_t(x)` with `h_t` in {-1, +1}; positive means class 1.
    pub fn decision_value(&self, x: &[f64]) -> f64 {
        self.learners
            .iter()
            .map(|(tree, alpha)| if tree.predict(x) == 1 { *alpha } else { -*alpha })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_matches_definition() {
        assert!((ALPHA_CAP - libm::log(1e10) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_first_round_stops_early() {
        let m = FeatureMatrix::from_dense(&[vec![0.0], vec![1.0], vec![5.0], vec![6.0]], vec![0, 0, 1, 1], ["neg", "pos"])
            .unwrap();
        let (ab, trace) = AdaBoost::fit_traced(&m, &AdaBoostParams::default()).unwrap();
        assert_eq!(ab.learners().len(), 1);
        assert_eq!(ab.learners()[0].1, ALPHA_CAP);
        assert_eq!(trace.stop, StopReason::PerfectLearner);
        for i in 0..4 {
            let x = m.dense_row(i);
            let weak = ab.learners()[0].0.predict(&x);
            assert_eq!(weak, m.labels()[i]);
            assert_eq!(usize::from(ab.decision_value(&x) > 0.0), weak);
        }
    }

    #[test]
    fn weights_stay_normalized() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let m = FeatureMatrix::from_dense(&rows, vec![0, 1, 0, 0, 1, 1, 0, 1], ["neg", "pos"]).unwrap();
        let (_, trace) = AdaBoost::fit_traced(&m, &AdaBoostParams { rounds: 6, ..Default::default() }).unwrap();
        for w in &trace.weights {
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(w.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn useless_first_round_is_kept() {
        // identical inputs, mixed labels: the stump is a majority leaf with eps = 0.5
        let m = FeatureMatrix::from_dense(&[vec![1.0], vec![1.0]], vec![0, 1], ["neg", "pos"]).unwrap();
        let (ab, trace) = AdaBoost::fit_traced(&m, &AdaBoostParams::default()).unwrap();
        assert_eq!(trace.stop, StopReason::WeakLearnerTooWeak);
        assert_eq!(ab.learners().len(), 1);
        assert_eq!(ab.decision_value(&[1.0]), -1.0);
    }
}
