//! Bag-of-words sentiment classification for Roman Urdu reviews.
//!
//! The pipeline: load labelled text ([`arff`]), tokenize and split it
//! ([`corpus`]), turn documents into word vectors ([`vectorize`]), train one
//! of eight classifiers ([`classifiers`]) and score it on a held-out set
//! ([`eval`]). [`synth`] generates a reproducible toy corpus.

pub mod arff;
pub mod classifiers;
pub mod corpus;
pub mod eval;
pub mod rng;
pub mod synth;
pub mod vectorize;

pub use arff::{parse_arff, write_arff, ArffError, Dataset, Document};
pub use classifiers::{train, Algorithm, ClassifierError, Model, TrainConfig};
pub use corpus::{split, SplitSpec, StopWordList, TokenizerConfig};
pub use eval::{compare, evaluate, EvalReport};
pub use vectorize::{FeatureMatrix, VectorSpace, VectorizerConfig, Weighting};
