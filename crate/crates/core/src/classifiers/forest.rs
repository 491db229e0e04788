//! Bootstrap-aggregated trees: bagging, and random forests when each split
//! only sees a random subset of the features.
//!
//! Member `i` draws from its own stream `SplitMix64::new(derive_seed(seed, i))`:
//! first `n` bootstrap indices (`below(n)` each), then the per-node feature
//! subsets while the tree grows. Members are independent, so they are
//! trained in parallel without changing the result. When the subset size
//! equals the feature count no subset is drawn, which makes a random forest
//! with `features_per_split = d` identical to bagging with the same seed.

use rayon::prelude::*;

use super::tree::{DecisionTree, FeatureSampler, Sample, TreeData, TreeParams};
use super::ClassifierError;
use crate::rng::{derive_seed, SplitMix64};
use crate::vectorize::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleParams {
    pub trees: usize,
    /// Features examined per split; `None` means `ceil(sqrt(d))` for a
    /// random forest and all features for bagging.
    pub features_per_split: Option<usize>,
    pub tree: TreeParams,
}

impl Default for EnsembleParams {
    fn default() -> Self {
        EnsembleParams {
            trees: 10,
            features_per_split: None,
            tree: TreeParams::default(),
        }
    }
}

/// `ceil(sqrt(d))`, at least 1.
pub fn default_features_per_split(width: usize) -> usize {
    let mut s = 1;
    while s * s < width {
        s += 1;
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub(crate) params: EnsembleParams,
    /// Resolved subset size used while training.
    pub(crate) features_per_split: usize,
    pub(crate) num_classes: usize,
    pub(crate) trees: Vec<DecisionTree>,
}

impl Forest {
    pub fn fit(matrix: &FeatureMatrix, params: &EnsembleParams, seed: u64, random_features: bool) -> Result<Self, ClassifierError> {
        if params.trees == 0 {
            return Err(ClassifierError::Hyperparameter("ensemble needs at least one tree".into()));
        }
        params.tree.validate()?;
        let d = matrix.width();
        let per_split = match (random_features, params.features_per_split) {
            (_, Some(m)) => m,
            (true, None) => default_features_per_split(d),
            (false, None) => d,
        };
        if d > 0 && !(1..=d).contains(&per_split) {
            return Err(ClassifierError::Hyperparameter(format!(
                "features_per_split must lie in 1..={d}, got {per_split}"
            )));
        }
        let n = matrix.len();
        let data = TreeData::from_matrix(matrix);
        let trees = (0..params.trees)
            .into_par_iter()
            .map(|member| {
                let mut rng = SplitMix64::new(derive_seed(seed, member as u64));
                let samples: Vec<Sample> = (0..n)
                    .map(|_| Sample {
                        row: rng.below(n),
                        weight: 1.0,
                    })
                    .collect();
                let sampler = FeatureSampler {
                    rng: &mut rng,
                    per_split,
                };
                DecisionTree::fit_samples(&data, samples, &params.tree, Some(sampler))
            })
            .collect();
        Ok(Forest {
            params: *params,
            features_per_split: per_split,
            num_classes: matrix.num_classes(),
            trees,
        })
    }

    pub fn params(&self) -> &EnsembleParams {
        &self.params
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn features_per_split(&self) -> usize {
        self.features_per_split
    }

    /// Fraction of member trees voting for each class.
    pub fn vote_fractions(&self, x: &[f64]) -> Vec<f64> {
        let mut votes = vec![0.0; self.num_classes];
        for t in &self.trees {
            votes[t.predict(x)] += 1.0;
        }
        let m = self.trees.len() as f64;
        votes.into_iter().map(|v| v / m).collect()
    }
}
