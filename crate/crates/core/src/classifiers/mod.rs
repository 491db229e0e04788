//! The eight classifiers behind one train/predict contract.
//!
//! Every model scores a dense feature vector with one finite number per
//! class; `predict` is the arg-max of those scores with ties going to the
//! lowest class index. The same lowest-index rule settles equal distances
//! (lowest training instance), equal split gains (lowest feature, then
//! lowest threshold) and zero margins (class 0).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::vectorize::FeatureMatrix;

pub mod adaboost;
pub mod forest;
pub mod knn;
pub mod mlp;
pub mod mnb;
mod persist;
pub mod svm;
pub mod tree;

pub use adaboost::{AdaBoost, AdaBoostParams, ALPHA_CAP};
pub use forest::{EnsembleParams, Forest};
pub use knn::{Distance, KNearest, KnnParams};
pub use mlp::{Activation, Mlp, MlpParams};
pub use mnb::{MnbParams, MultinomialNb};
pub use persist::{PersistError, FORMAT_VERSION};
pub use svm::{LinearSvm, SvmParams};
pub use tree::{entropy, DecisionTree, Node, TreeParams};

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("class '{0}' has no training instances")]
    EmptyClass(String),
    #[error("{algorithm} handles exactly two classes, got {found}")]
    NotBinary { algorithm: Algorithm, found: usize },
    #[error("feature vector has width {found}, model expects {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("invalid hyperparameter: {0}")]
    Hyperparameter(String),
    #[error("invalid training data: {0}")]
    Data(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Mnb,
    Knn,
    Dtree,
    Bagging,
    Rforest,
    Adaboost,
    Svm,
    Mlp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Mlp,
        Algorithm::Dtree,
        Algorithm::Bagging,
        Algorithm::Rforest,
        Algorithm::Mnb,
        Algorithm::Knn,
        Algorithm::Adaboost,
        Algorithm::Svm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mnb => "mnb",
            Algorithm::Knn => "knn",
            Algorithm::Dtree => "dtree",
            Algorithm::Bagging => "bagging",
            Algorithm::Rforest => "rforest",
            Algorithm::Adaboost => "adaboost",
            Algorithm::Svm => "svm",
            Algorithm::Mlp => "mlp",
        }
    }

    /// Human-readable name for report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::Mnb => "Multinomial Naive Bayes",
            Algorithm::Knn => "k-NN",
            Algorithm::Dtree => "Decision Tree",
            Algorithm::Bagging => "Bagging",
            Algorithm::Rforest => "Random Forests",
            Algorithm::Adaboost => "AdaBoost",
            Algorithm::Svm => "SVM",
            Algorithm::Mlp => "Deep Neural Network",
        }
    }

    pub fn valid_names() -> String {
        Algorithm::ALL.map(Algorithm::name).join(", ")
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm '{s}'; valid names: {}", Algorithm::valid_names()))
    }
}

/// Seed plus every algorithm's hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub seed: u64,
    pub mnb: MnbParams,
    pub knn: KnnParams,
    pub dtree: TreeParams,
    pub bagging: EnsembleParams,
    pub rforest: EnsembleParams,
    pub adaboost: AdaBoostParams,
    pub svm: SvmParams,
    pub mlp: MlpParams,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            seed: 42,
            mnb: MnbParams::default(),
            knn: KnnParams::default(),
            dtree: TreeParams::default(),
            bagging: EnsembleParams::default(),
            rforest: EnsembleParams::default(),
            adaboost: AdaBoostParams::default(),
            svm: SvmParams::default(),
            mlp: MlpParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Mnb(MultinomialNb),
    Knn(KNearest),
    Dtree(DecisionTree),
    Bagging(Forest),
    Rforest(Forest),
    Adaboost(AdaBoost),
    Svm(LinearSvm),
    Mlp(Mlp),
}

/// A trained classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    class_values: Vec<String>,
    feature_width: usize,
    kind: ModelKind,
}

impl Model {
    pub(crate) fn from_parts(class_values: Vec<String>, feature_width: usize, kind: ModelKind) -> Self {
        Model {
            class_values,
            feature_width,
            kind,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self.kind {
            ModelKind::Mnb(_) => Algorithm::Mnb,
            ModelKind::Knn(_) => Algorithm::Knn,
            ModelKind::Dtree(_) => Algorithm::Dtree,
            ModelKind::Bagging(_) => Algorithm::Bagging,
            ModelKind::Rforest(_) => Algorithm::Rforest,
            ModelKind::Adaboost(_) => Algorithm::Adaboost,
            ModelKind::Svm(_) => Algorithm::Svm,
            ModelKind::Mlp(_) => Algorithm::Mlp,
        }
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn class_values(&self) -> &[String] {
        &self.class_values
    }

    pub fn feature_width(&self) -> usize {
        self.feature_width
    }

    fn check_width(&self, x: &[f64]) -> Result<(), ClassifierError> {
        if x.len() != self.feature_width {
            return Err(ClassifierError::WidthMismatch {
                expected: self.feature_width,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// One finite score per class. Probabilities for mnb and mlp, vote
    /// fractions for knn and the tree ensembles, leaf class proportions for
    /// dtree, and `(-v, v)` margin pairs for svm and adaboost.
    pub fn predict_scores(&self, x: &[f64]) -> Result<Vec<f64>, ClassifierError> {
        self.check_width(x)?;
        Ok(match &self.kind {
            ModelKind::Mnb(m) => m.probabilities(x),
            ModelKind::Knn(m) => m.vote_fractions(x),
            ModelKind::Dtree(m) => m.distribution(x).to_vec(),
            ModelKind::Bagging(m) | ModelKind::Rforest(m) => m.vote_fractions(x),
            ModelKind::Adaboost(m) => {
                let v = m.decision_value(x);
                vec![-v, v]
            }
            ModelKind::Svm(m) => {
                let v = m.decision_value(x);
                vec![-v, v]
            }
            ModelKind::Mlp(m) => m.probabilities(x),
        })
    }

    /// Predicted class index.
    pub fn predict(&self, x: &[f64]) -> Result<usize, ClassifierError> {
        Ok(argmax(&self.predict_scores(x)?))
    }

    pub fn predict_label(&self, x: &[f64]) -> Result<&str, ClassifierError> {
        let c = self.predict(x)?;
        Ok(&self.class_values[c])
    }

    /// Predictions for every row of `matrix`.
    pub fn predict_matrix(&self, matrix: &FeatureMatrix) -> Result<Vec<usize>, ClassifierError> {
        if matrix.width() != self.feature_width {
            return Err(ClassifierError::WidthMismatch {
                expected: self.feature_width,
                found: matrix.width(),
            });
        }
        (0..matrix.len())
            .map(|i| self.predict(&matrix.dense_row(i)))
            .collect()
    }

    /// Fraction of `matrix` rows predicted correctly.
    pub fn accuracy_on(&self, matrix: &FeatureMatrix) -> Result<f64, ClassifierError> {
        let preds = self.predict_matrix(matrix)?;
        let correct = preds.iter().zip(matrix.labels()).filter(|(p, l)| p == l).count();
        Ok(correct as f64 / matrix.len().max(1) as f64)
    }
}

/// Index of the largest value; the first one wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn check_trainable(matrix: &FeatureMatrix) -> Result<(), ClassifierError> {
    if matrix.is_empty() {
        return Err(ClassifierError::EmptyTrainingSet);
    }
    Ok(())
}

fn require_binary(algorithm: Algorithm, matrix: &FeatureMatrix) -> Result<(), ClassifierError> {
    if matrix.num_classes() != 2 {
        return Err(ClassifierError::NotBinary {
            algorithm,
            found: matrix.num_classes(),
        });
    }
    Ok(())
}

pub fn train_mnb(matrix: &FeatureMatrix, params: &MnbParams) -> Result<Model, ClassifierError> {
    check_trainable(matrix)?;
    let m = MultinomialNb::fit(matrix, params)?;
    Ok(Model::from_parts(matrix.class_values().to_vec(), matrix.width(), ModelKind::Mnb(m)))
}

pub fn train_knn(matrix: &FeatureMatrix, params: &KnnParams) -> Result<Model, ClassifierError> {
    check_trainable(matrix)?;
    let m = KNearest::fit(matrix, params)?;
    Ok(Model::from_parts(matrix.class_values().to_vec(), matrix.width(), ModelKind::Knn(m)))
}

pub fn train_dtree(matrix: &FeatureMatrix, params: &TreeParams) -> Result<Model, ClassifierError> {
    check_trainable(matrix)?;
    params.validate()?;
    let m = DecisionTree::fit_matrix(matrix, params);
    Ok(Model::from_parts(matrix.class_values().to_vec(), matrix.width(), ModelKind::Dtree(m)))
}

pub fn train_bagging(matrix: &FeatureMatrix, params: &EnsembleParams, seed: u64) -> Result<Model, ClassifierError> {
    check_trainable(matrix)?;
    let m = Forest::fit(matrix, params, seed, false)?;
    Ok(Model::from_parts(matrix.class_values().to_vec(), matrix.width(), ModelKind::Bagging(m)))
}

pub fn train_rforest(matrix: &FeatureMatrix, params: &EnsembleParams, seed: u64) -> Result<Model, ClassifierError> {
    check_trainable(matrix)?;
    let m = Forest::fit(matrix, params, seed, true)?;
    Ok(Model::from_parts(matrix.class_values().to_vec(), matrix.width(), ModelKind::Rforest(m)))
}

pub fn train_adaboost(matrix: &FeatureMatrix, params: &AdaBoostParams) -> Result<Model, ClassifierError> {
    check_trainable(matrix)?;
    require_binary(Algorithm::Adaboost, matrix)?;
    let m = AdaBoost::fit(matrix, params)?;
    Ok(Model::from_parts(matrix.class_values().to_vec(), matrix.width(), ModelKind::Adaboost(m)))
}

pub fn train_svm(matrix: &FeatureMatrix, params: &SvmParams, seed: u64) -> Result<Model, ClassifierError> {
    check_trainable(matrix)?;
    require_binary(Algorithm::Svm, matrix)?;
    let m = LinearSvm::fit(matrix, params, seed)?;
    Ok(Model::from_parts(matrix.class_values().to_vec(), matrix.width(), ModelKind::Svm(m)))
}

pub fn train_mlp(matrix: &FeatureMatrix, params: &MlpParams, seed: u64) -> Result<Model, ClassifierError> {
    check_trainable(matrix)?;
    let m = Mlp::fit(matrix, params, seed)?;
    Ok(Model::from_parts(matrix.class_values().to_vec(), matrix.width(), ModelKind::Mlp(m)))
}

/// Trains `algorithm` with its hyperparameters from `config`.
pub fn train(algorithm: Algorithm, matrix: &FeatureMatrix, config: &TrainConfig) -> Result<Model, ClassifierError> {
    match algorithm {
        Algorithm::Mnb => train_mnb(matrix, &config.mnb),
        Algorithm::Knn => train_knn(matrix, &config.knn),
        Algorithm::Dtree => train_dtree(matrix, &config.dtree),
        Algorithm::Bagging => train_bagging(matrix, &config.bagging, config.seed),
        Algorithm::Rforest => train_rforest(matrix, &config.rforest, config.seed),
        Algorithm::Adaboost => train_adaboost(matrix, &config.adaboost),
        Algorithm::Svm => train_svm(matrix, &config.svm, config.seed),
        Algorithm::Mlp => train_mlp(matrix, &config.mlp, config.seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        let err = "unknown".parse::<Algorithm>().unwrap_err();
        for a in Algorithm::ALL {
            assert!(err.contains(a.name()));
        }
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.1, 0.7, 0.7]), 1);
        assert_eq!(argmax(&[-0.0, 0.0]), 0);
    }

    #[test]
    fn binary_only_variants_reject_three_classes() {
        let m = FeatureMatrix::from_dense(&[vec![0.0], vec![1.0], vec![2.0]], vec![0, 1, 2], ["a", "b", "c"]).unwrap();
        let cfg = TrainConfig::default();
        assert!(matches!(
            train(Algorithm::Svm, &m, &cfg),
            Err(ClassifierError::NotBinary { .. })
        ));
        assert!(matches!(
            train(Algorithm::Adaboost, &m, &cfg),
            Err(ClassifierError::NotBinary { .. })
        ));
        // the others handle three classes
        for a in [Algorithm::Mnb, Algorithm::Knn, Algorithm::Dtree, Algorithm::Bagging, Algorithm::Rforest, Algorithm::Mlp] {
            let model = train(a, &m, &cfg).unwrap();
            assert_eq!(model.predict_scores(&[1.0]).unwrap().len(), 3);
        }
    }

    #[test]
    fn width_mismatch_is_reported() {
        let m = FeatureMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]], vec![0, 1], ["neg", "pos"]).unwrap();
        for a in Algorithm::ALL {
            let model = train(a, &m, &TrainConfig::default()).unwrap();
            assert!(matches!(
                model.predict(&[1.0]),
                Err(ClassifierError::WidthMismatch { expected: 2, found: 1 })
            ));
            let x = [1.0, 0.0];
            assert_eq!(model.predict(&x).unwrap(), model.predict(&x).unwrap());
            assert!(model.predict_scores(&x).unwrap().iter().all(|s| s.is_finite()));
        }
    }

    #[test]
    fn empty_training_set_rejected() {
        let m = FeatureMatrix::new(2, vec![], vec![], vec!["a".into(), "b".into()]).unwrap();
        for a in Algorithm::ALL {
            assert!(train(a, &m, &TrainConfig::default()).is_err(), "{a}");
        }
    }
}
