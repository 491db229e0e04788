use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sentikit_core::classifiers::{
    AdaBoostParams, Activation, Algorithm, Distance, EnsembleParams, KnnParams, MlpParams, MnbParams, SvmParams,
    TrainConfig, TreeParams,
};
use sentikit_core::vectorize::Weighting;

#[derive(Parser, Debug)]
#[command(
    name = "sentikit",
    version,
    about = "Bag-of-words sentiment classification for Roman Urdu reviews",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load a directory of class subdirectories (one text file per review) into an ARFF file
    Convert(ConvertArgs),
    /// Write a synthetic labelled review corpus as class subdirectories
    Generate(GenerateArgs),
    /// Split an ARFF dataset into train and test files
    Split(SplitArgs),
    /// Turn text ARFF files into word-vector ARFF files over the training vocabulary
    Vectorize(VectorizeArgs),
    /// Train one classifier on a vectorized ARFF file and save the model
    Train(TrainArgs),
    /// Score a saved model on a vectorized test set
    Evaluate(EvaluateArgs),
    /// Train and evaluate several classifiers and tabulate the results
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    /// Directory holding one subdirectory per class
    pub input_dir: PathBuf,
    /// ARFF file to write
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Directory to create; must be empty or absent
    pub output_dir: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub docs_per_class: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Probability that a review also carries one opposite-polarity word
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    /// ARFF dataset with a nominal class attribute
    pub input: PathBuf,
    #[arg(long)]
    pub train_out: PathBuf,
    #[arg(long)]
    pub test_out: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Split the whole dataset at once instead of class by class
    #[arg(long)]
    pub no_stratify: bool,
}

#[derive(Args, Debug, Clone)]
pub struct TextArgs {
    #[arg(long, default_value = "count")]
    pub weighting: Weighting,
    /// Stop-word file (one word per line, '#' comments); defaults to the bundled Roman Urdu list
    #[arg(long, conflicts_with = "no_stopwords")]
    pub stopwords: Option<PathBuf>,
    /// Keep every token
    #[arg(long)]
    pub no_stopwords: bool,
    /// Drop terms seen fewer times than this in the training data
    #[arg(long, default_value_t = 1)]
    pub min_term_freq: u32,
}

#[derive(Args, Debug)]
pub struct VectorizeArgs {
    /// Training ARFF with a string attribute and a class
    pub train: PathBuf,
    #[arg(long)]
    pub out_train: PathBuf,
    /// Test ARFF, transformed with the training vocabulary
    #[arg(long, requires = "out_test")]
    pub test: Option<PathBuf>,
    #[arg(long, requires = "test")]
    pub out_test: Option<PathBuf>,
    /// Vocabulary file, one term per line in feature order
    #[arg(long)]
    pub vocab: PathBuf,
    /// Write dense rows instead of sparse ones
    #[arg(long)]
    pub dense: bool,
    #[command(flatten)]
    pub text: TextArgs,
}

#[derive(Args, Debug, Clone)]
pub struct HyperArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// mnb: additive smoothing
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// knn: neighbours consulted
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// knn: euclidean, manhattan or minkowski:<p>
    #[arg(long, default_value = "euclidean")]
    pub distance: Distance,
    /// dtree, bagging, rforest: depth limit (unlimited when omitted)
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// dtree, bagging, rforest: smallest leaf
    #[arg(long, default_value_t = 1)]
    pub min_leaf: usize,
    /// bagging, rforest: ensemble size
    #[arg(long, default_value_t = 10)]
    pub trees: usize,
    /// rforest: features tried per split (ceil(sqrt(d)) when omitted)
    #[arg(long)]
    pub features_per_split: Option<usize>,
    /// adaboost: boosting rounds
    #[arg(long, default_value_t = 10)]
    pub rounds: usize,
    /// adaboost: depth of each weak tree
    #[arg(long, default_value_t = 1)]
    pub weak_depth: usize,
    /// svm: regularization strength
    #[arg(long, default_value_t = 1e-3)]
    pub lambda: f64,
    /// svm: passes over the training set
    #[arg(long, default_value_t = 100)]
    pub svm_epochs: usize,
    /// mlp: comma-separated hidden layer widths
    #[arg(long, value_delimiter = ',', default_value = "32,32")]
    pub hidden: Vec<usize>,
    /// mlp: logistic or tanh
    #[arg(long, default_value = "logistic")]
    pub activation: Activation,
    /// mlp: gradient step
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    /// mlp: passes over the training set
    #[arg(long, default_value_t = 200)]
    pub mlp_epochs: usize,
    /// mlp: instances per gradient step
    #[arg(long, default_value_t = 16)]
    pub batch_size: usize,
}

impl HyperArgs {
    pub fn config(&self) -> TrainConfig {
        let tree = TreeParams {
            max_depth: self.max_depth,
            min_leaf: self.min_leaf,
        };
        TrainConfig {
            seed: self.seed,
            mnb: MnbParams { alpha: self.alpha },
            knn: KnnParams {
                k: self.k,
                distance: self.distance,
            },
            dtree: tree,
            bagging: EnsembleParams {
                trees: self.trees,
                features_per_split: None,
                tree,
            },
            rforest: EnsembleParams {
                trees: self.trees,
                features_per_split: self.features_per_split,
                tree,
            },
            adaboost: AdaBoostParams {
                rounds: self.rounds,
                weak: TreeParams {
                    max_depth: Some(self.weak_depth),
                    min_leaf: 1,
                },
            },
            svm: SvmParams {
                lambda: self.lambda,
                epochs: self.svm_epochs,
            },
            mlp: MlpParams {
                hidden: self.hidden.clone(),
                activation: self.activation,
                learning_rate: self.learning_rate,
                epochs: self.mlp_epochs,
                batch_size: self.batch_size,
            },
        }
    }
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Vectorized (numeric) training ARFF
    pub train: PathBuf,
    #[arg(long)]
    pub algorithm: Algorithm,
    #[arg(long)]
    pub model_out: PathBuf,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    pub model: PathBuf,
    /// Vectorized test ARFF built with the model's vocabulary
    pub test: PathBuf,
    /// Class counted as positive ("pos" when declared, else the first class)
    #[arg(long)]
    pub positive_class: Option<String>,
    /// JSON report path (defaults to the model path with a .report.json suffix)
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Training ARFF, either text (vectorized here) or already numeric
    pub train: PathBuf,
    /// Test ARFF of the same kind
    pub test: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Comma-separated algorithm names; all eight when omitted
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Vec<Algorithm>,
    #[arg(long)]
    pub positive_class: Option<String>,
    #[command(flatten)]
    pub text: TextArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
}
