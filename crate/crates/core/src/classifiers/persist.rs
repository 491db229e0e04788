//! Plain-text model files.
//!
//! One `key = value` pair per line. The header comes first:
//!
//! ```text
//! format = sentikit-model
//! version = 1
//! variant = <algorithm name>
//! feature_width = <d>
//! classes = <k>
//! class.<i> = <class value>
//! param.<name> = <hyperparameter>
//! ```
//!
//! followed by the learned parameters of the variant:
//!
//! | variant | body keys |
//! |---|---|
//! | mnb | `log_prior`, `log_likelihood.<c>` |
//! | knn | `rows`, `row.<i> = <label> \| <feature>:<value> ...` |
//! | dtree | `nodes`, `node.<i>` |
//! | bagging, rforest | `features_per_split`, `trees`, `tree.<t>.nodes`, `tree.<t>.node.<i>` |
//! | adaboost | `learners`, `learner.<t>.alpha`, `learner.<t>.nodes`, `learner.<t>.node.<i>` |
//! | svm | `bias`, `weights` |
//! | mlp | `layers`, `layer.<l>.shape = <outputs> <inputs>`, `layer.<l>.weights`, `layer.<l>.bias` |
//!
//! Tree nodes are listed in pre-order as `leaf <p_0> ... <p_k-1>` or
//! `split <feature> <threshold> <gain> <left> <right>`. Numbers use the
//! shortest decimal form that reads back to the same `f64`, so a load and
//! save reproduces the file byte for byte. Class values escape `\`, line
//! feeds and carriage returns with a backslash.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::adaboost::{AdaBoost, AdaBoostParams};
use super::forest::{EnsembleParams, Forest};
use super::knn::{Distance, KNearest, KnnParams};
use super::mlp::{Activation, Layer, Mlp, MlpParams};
use super::mnb::{MnbParams, MultinomialNb};
use super::svm::{LinearSvm, SvmParams};
use super::tree::{DecisionTree, Node, TreeParams};
use super::{Algorithm, Model, ModelKind};
use crate::vectorize::SparseVector;

pub const FORMAT_NAME: &str = "sentikit-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("not a model file (expected 'format = {FORMAT_NAME}' on the first line)")]
    NotAModel,
    #[error("unsupported model format version '{0}' (this build reads version {FORMAT_VERSION})")]
    UnsupportedVersion(String),
    #[error("missing key '{0}'")]
    Missing(String),
    #[error("key '{key}': {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> PersistError {
    PersistError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(key: &str, s: &str) -> Result<String, PersistError> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => return Err(invalid(key, format!("bad escape '\\{}'", other.map(String::from).unwrap_or_default()))),
        }
    }
    Ok(out)
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn nums(values: &[f64]) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v:?}");
    }
    out
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "none".to_string(), |d| d.to_string())
}

struct Writer {
    out: String,
}

impl Writer {
    fn put(&mut self, key: &str, value: impl AsRef<str>) {
        self.out.push_str(key);
        self.out.push_str(" = ");
        self.out.push_str(value.as_ref());
        self.out.push('\n');
    }

    fn tree_params(&mut self, prefix: &str, p: &TreeParams) {
        self.put(&format!("{prefix}max_depth"), opt(p.max_depth));
        self.put(&format!("{prefix}min_leaf"), p.min_leaf.to_string());
    }

    fn nodes(&mut self, prefix: &str, tree: &DecisionTree) {
        self.put(&format!("{prefix}nodes"), tree.nodes.len().to_string());
        for (i, node) in tree.nodes.iter().enumerate() {
            let value = match node {
                Node::Leaf { distribution } => format!("leaf {}", nums(distribution)),
                Node::Split {
                    feature,
                    threshold,
                    gain,
                    left,
                    right,
                } => format!("split {feature} {} {} {left} {right}", num(*threshold), num(*gain)),
            };
            self.put(&format!("{prefix}node.{i}"), value);
        }
    }
}

impl Model {
    /// Serializes the model in the versioned text format.
    pub fn to_text(&self) -> String {
        let mut w = Writer { out: String::new() };
        w.put("format", FORMAT_NAME);
        w.put("version", FORMAT_VERSION.to_string());
        w.put("variant", self.algorithm().name());
        w.put("feature_width", self.feature_width().to_string());
        w.put("classes", self.class_values().len().to_string());
        for (i, c) in self.class_values().iter().enumerate() {
            w.put(&format!("class.{i}"), escape(c));
        }
        match self.kind() {
            ModelKind::Mnb(m) => {
                w.put("param.alpha", num(m.params.alpha));
                w.put("log_prior", nums(&m.log_prior));
                for (c, row) in m.log_likelihood.iter().enumerate() {
                    w.put(&format!("log_likelihood.{c}"), nums(row));
                }
            }
            ModelKind::Knn(m) => {
                w.put("param.k", m.params.k.to_string());
                w.put("param.distance", m.params.distance.to_string());
                w.put("rows", m.rows.len().to_string());
                for (i, (row, label)) in m.rows.iter().zip(&m.labels).enumerate() {
                    let mut value = format!("{label} |");
                    for (f, v) in row.iter() {
                        let _ = write!(value, " {f}:{v:?}");
                    }
                    w.put(&format!("row.{i}"), value);
                }
            }
            ModelKind::Dtree(m) => {
                w.tree_params("param.", &m.params);
                w.nodes("", m);
            }
            ModelKind::Bagging(m) | ModelKind::Rforest(m) => {
                w.put("param.trees", m.params.trees.to_string());
                w.put("param.features_per_split", opt(m.params.features_per_split));
                w.tree_params("param.tree.", &m.params.tree);
                w.put("features_per_split", m.features_per_split.to_string());
                w.put("trees", m.trees.len().to_string());
                for (t, tree) in m.trees.iter().enumerate() {
                    w.nodes(&format!("tree.{t}."), tree);
                }
            }
            ModelKind::Adaboost(m) => {
                w.put("param.rounds", m.params.rounds.to_string());
                w.tree_params("param.weak.", &m.params.weak);
                w.put("learners", m.learners.len().to_string());
                for (t, (tree, alpha)) in m.learners.iter().enumerate() {
                    w.put(&format!("learner.{t}.alpha"), num(*alpha));
                    w.nodes(&format!("learner.{t}."), tree);
                }
            }
            ModelKind::Svm(m) => {
                w.put("param.lambda", num(m.params.lambda));
                w.put("param.epochs", m.params.epochs.to_string());
                w.put("bias", num(m.bias));
                w.put("weights", nums(&m.weights));
            }
            ModelKind::Mlp(m) => {
                let hidden: Vec<String> = m.params.hidden.iter().map(usize::to_string).collect();
                w.put("param.hidden", hidden.join(" "));
                w.put("param.activation", m.params.activation.name());
                w.put("param.learning_rate", num(m.params.learning_rate));
                w.put("param.epochs", m.params.epochs.to_string());
                w.put("param.batch_size", m.params.batch_size.to_string());
                w.put("layers", m.layers.len().to_string());
                for (l, layer) in m.layers.iter().enumerate() {
                    w.put(&format!("layer.{l}.shape"), format!("{} {}", layer.outputs, layer.inputs));
                    w.put(&format!("layer.{l}.weights"), nums(&layer.weights));
                    w.put(&format!("layer.{l}.bias"), nums(&layer.bias));
                }
            }
        }
        w.out
    }

    /// Parses a model written by [`Model::to_text`].
    pub fn from_text(text: &str) -> Result<Model, PersistError> {
        let fields = Fields::read(text)?;
        let variant: Algorithm = fields.parse("variant")?;
        let width: usize = fields.parse("feature_width")?;
        let k: usize = fields.parse("classes")?;
        if k < 2 {
            return Err(invalid("classes", "a model needs at least two classes"));
        }
        let class_values = (0..k)
            .map(|i| {
                let key = format!("class.{i}");
                unescape(&key, fields.get(&key)?)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let kind = match variant {
            Algorithm::Mnb => {
                let params = MnbParams {
                    alpha: fields.parse("param.alpha")?,
                };
                let log_prior = fields.floats_len("log_prior", k)?;
                let log_likelihood = (0..k)
                    .map(|c| fields.floats_len(&format!("log_likelihood.{c}"), width))
                    .collect::<Result<_, _>>()?;
                ModelKind::Mnb(MultinomialNb {
                    params,
                    log_prior,
                    log_likelihood,
                })
            }
            Algorithm::Knn => {
                let params = KnnParams {
                    k: fields.parse("param.k")?,
                    distance: fields.parse::<Distance>("param.distance")?,
                };
                let n: usize = fields.parse("rows")?;
                if params.k == 0 || params.k > n {
                    return Err(invalid("param.k", format!("must lie in 1..={n}")));
                }
                let mut rows = Vec::with_capacity(n);
                let mut labels = Vec::with_capacity(n);
                for i in 0..n {
                    let key = format!("row.{i}");
                    let (label, row) = parse_knn_row(&key, fields.get(&key)?, width, k)?;
                    labels.push(label);
                    rows.push(row);
                }
                ModelKind::Knn(KNearest {
                    params,
                    num_classes: k,
                    rows,
                    labels,
                })
            }
            Algorithm::Dtree => {
                let params = fields.tree_params("param.")?;
                ModelKind::Dtree(fields.tree("", params, width, k)?)
            }
            Algorithm::Bagging | Algorithm::Rforest => {
                let params = EnsembleParams {
                    trees: fields.parse("param.trees")?,
                    features_per_split: fields.opt("param.features_per_split")?,
                    tree: fields.tree_params("param.tree.")?,
                };
                let features_per_split = fields.parse("features_per_split")?;
                let m: usize = fields.parse("trees")?;
                if m == 0 {
                    return Err(invalid("trees", "an ensemble needs at least one tree"));
                }
                let trees = (0..m)
                    .map(|t| fields.tree(&format!("tree.{t}."), params.tree, width, k))
                    .collect::<Result<_, _>>()?;
                let forest = Forest {
                    params,
                    features_per_split,
                    num_classes: k,
                    trees,
                };
                if variant == Algorithm::Bagging {
                    ModelKind::Bagging(forest)
                } else {
                    ModelKind::Rforest(forest)
                }
            }
            Algorithm::Adaboost => {
                if k != 2 {
                    return Err(invalid("classes", "adaboost models have exactly two classes"));
                }
                let params = AdaBoostParams {
                    rounds: fields.parse("param.rounds")?,
                    weak: fields.tree_params("param.weak.")?,
                };
                let t: usize = fields.parse("learners")?;
                let learners = (0..t)
                    .map(|i| {
                        let prefix = format!("learner.{i}.");
                        let alpha = fields.finite(&format!("{prefix}alpha"))?;
                        Ok((fields.tree(&prefix, params.weak, width, k)?, alpha))
                    })
                    .collect::<Result<_, PersistError>>()?;
                ModelKind::Adaboost(AdaBoost { params, learners })
            }
            Algorithm::Svm => {
                if k != 2 {
                    return Err(invalid("classes", "svm models have exactly two classes"));
                }
                let params = SvmParams {
                    lambda: fields.parse("param.lambda")?,
                    epochs: fields.parse("param.epochs")?,
                };
                ModelKind::Svm(LinearSvm {
                    params,
                    weights: fields.floats_len("weights", width)?,
                    bias: fields.finite("bias")?,
                })
            }
            Algorithm::Mlp => {
                let hidden = fields
                    .get("param.hidden")?
                    .split_whitespace()
                    .map(|s| s.parse::<usize>().map_err(|e| invalid("param.hidden", e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                let params = MlpParams {
                    hidden,
                    activation: fields.parse::<Activation>("param.activation")?,
                    learning_rate: fields.parse("param.learning_rate")?,
                    epochs: fields.parse("param.epochs")?,
                    batch_size: fields.parse("param.batch_size")?,
                };
                let count: usize = fields.parse("layers")?;
                if count != params.hidden.len() + 1 {
                    return Err(invalid("layers", "layer count disagrees with param.hidden"));
                }
                let mut expected_in = width;
                let mut layers = Vec::with_capacity(count);
                for l in 0..count {
                    let key = format!("layer.{l}.shape");
                    let shape: Vec<usize> = fields
                        .get(&key)?
                        .split_whitespace()
                        .map(|s| s.parse::<usize>().map_err(|e| invalid(&key, e.to_string())))
                        .collect::<Result<_, _>>()?;
                    let expected_out = params.hidden.get(l).copied().unwrap_or(k);
                    if shape != [expected_out, expected_in] {
                        return Err(invalid(&key, format!("expected '{expected_out} {expected_in}'")));
                    }
                    layers.push(Layer {
                        inputs: expected_in,
                        outputs: expected_out,
                        weights: fields.floats_len(&format!("layer.{l}.weights"), expected_out * expected_in)?,
                        bias: fields.floats_len(&format!("layer.{l}.bias"), expected_out)?,
                    });
                    expected_in = expected_out;
                }
                ModelKind::Mlp(Mlp { params, layers })
            }
        };
        Ok(Model::from_parts(class_values, width, kind))
    }
}

fn parse_knn_row(key: &str, value: &str, width: usize, k: usize) -> Result<(usize, SparseVector), PersistError> {
    let (label, entries) = value
        .split_once('|')
        .ok_or_else(|| invalid(key, "expected '<label> | <feature>:<value> ...'"))?;
    let label: usize = label.trim().parse().map_err(|_| invalid(key, "bad label"))?;
    if label >= k {
        return Err(invalid(key, format!("label {label} out of range")));
    }
    let mut pairs = Vec::new();
    let mut last: Option<usize> = None;
    for entry in entries.split_whitespace() {
        let (f, v) = entry
            .split_once(':')
            .ok_or_else(|| invalid(key, format!("bad entry '{entry}'")))?;
        let f: usize = f.parse().map_err(|_| invalid(key, format!("bad feature index '{f}'")))?;
        let v: f64 = v.parse().map_err(|_| invalid(key, format!("bad value '{v}'")))?;
        if f >= width || last.is_some_and(|p| f <= p) || !v.is_finite() || v == 0.0 {
            return Err(invalid(key, format!("entry '{entry}' is out of order or out of range")));
        }
        last = Some(f);
        pairs.push((f, v));
    }
    Ok((label, SparseVector::from_pairs(pairs)))
}

struct Fields<'a> {
    map: HashMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn read(text: &'a str) -> Result<Self, PersistError> {
        let mut map = HashMap::new();
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut split = |expected: Option<&str>| -> Result<Option<(&'a str, &'a str)>, PersistError> {
            let Some((i, line)) = lines.next() else {
                return Ok(None);
            };
            let (k, v) = line.split_once(" = ").ok_or(PersistError::Syntax {
                line: i + 1,
                message: "expected 'key = value'".into(),
            })?;
            if let Some(e) = expected {
                if k != e {
                    return Err(if e == "format" {
                        PersistError::NotAModel
                    } else {
                        PersistError::Missing(e.to_string())
                    });
                }
            }
            if map.insert(k, v).is_some() {
                return Err(PersistError::Syntax {
                    line: i + 1,
                    message: format!("duplicate key '{k}'"),
                });
            }
            Ok(Some((k, v)))
        };
        match split(Some("format"))? {
            Some((_, FORMAT_NAME)) => {}
            _ => return Err(PersistError::NotAModel),
        }
        match split(Some("version"))? {
            Some((_, v)) if v == FORMAT_VERSION.to_string() => {}
            Some((_, v)) => return Err(PersistError::UnsupportedVersion(v.to_string())),
            None => return Err(PersistError::Missing("version".into())),
        }
        while split(None)?.is_some() {}
        Ok(Fields { map })
    }

    fn get(&self, key: &str) -> Result<&'a str, PersistError> {
        self.map
            .get(key)
            .copied()
            .ok_or_else(|| PersistError::Missing(key.to_string()))
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<T, PersistError>
    where
        T::Err: ToString,
    {
        self.get(key)?.parse().map_err(|e: T::Err| invalid(key, e.to_string()))
    }

    fn opt(&self, key: &str) -> Result<Option<usize>, PersistError> {
        match self.get(key)? {
            "none" => Ok(None),
            _ => self.parse(key).map(Some),
        }
    }

    fn finite(&self, key: &str) -> Result<f64, PersistError> {
        let v: f64 = self.parse(key)?;
        if !v.is_finite() {
            return Err(invalid(key, "value is not finite"));
        }
        Ok(v)
    }

    fn floats_len(&self, key: &str, len: usize) -> Result<Vec<f64>, PersistError> {
        let values = parse_floats(key, self.get(key)?)?;
        if values.len() != len {
            return Err(invalid(key, format!("expected {len} values, found {}", values.len())));
        }
        Ok(values)
    }

    fn tree_params(&self, prefix: &str) -> Result<TreeParams, PersistError> {
        Ok(TreeParams {
            max_depth: self.opt(&format!("{prefix}max_depth"))?,
            min_leaf: self.parse(&format!("{prefix}min_leaf"))?,
        })
    }

    fn tree(&self, prefix: &str, params: TreeParams, width: usize, k: usize) -> Result<DecisionTree, PersistError> {
        let count_key = format!("{prefix}nodes");
        let n: usize = self.parse(&count_key)?;
        if n == 0 {
            return Err(invalid(&count_key, "a tree has at least one node"));
        }
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let key = format!("{prefix}node.{i}");
            let value = self.get(&key)?;
            let (tag, rest) = value.split_once(' ').unwrap_or((value, ""));
            let node = match tag {
                "leaf" => {
                    let distribution = parse_floats(&key, rest)?;
                    if distribution.len() != k {
                        return Err(invalid(&key, format!("expected {k} class proportions")));
                    }
                    Node::Leaf { distribution }
                }
                "split" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    let [feature, threshold, gain, left, right] = parts[..] else {
                        return Err(invalid(&key, "expected 'split <feature> <threshold> <gain> <left> <right>'"));
                    };
                    let bad = |what: &str| invalid(&key, format!("bad {what}"));
                    let feature: usize = feature.parse().map_err(|_| bad("feature"))?;
                    let threshold: f64 = threshold.parse().map_err(|_| bad("threshold"))?;
                    let gain: f64 = gain.parse().map_err(|_| bad("gain"))?;
                    let left: usize = left.parse().map_err(|_| bad("left child"))?;
                    let right: usize = right.parse().map_err(|_| bad("right child"))?;
                    // children always follow their parent in pre-order
                    if feature >= width || left <= i || right <= i || left >= n || right >= n || !threshold.is_finite() {
                        return Err(invalid(&key, "split refers outside the tree or feature range"));
                    }
                    Node::Split {
                        feature,
                        threshold,
                        gain,
                        left,
                        right,
                    }
                }
                other => return Err(invalid(&key, format!("unknown node kind '{other}'"))),
            };
            nodes.push(node);
        }
        Ok(DecisionTree { params, nodes })
    }
}

fn parse_floats(key: &str, s: &str) -> Result<Vec<f64>, PersistError> {
    s.split_whitespace()
        .map(|t| match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(invalid(key, format!("bad number '{t}'"))),
        })
        .collect()
}
