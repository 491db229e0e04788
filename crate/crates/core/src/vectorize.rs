//! Bag-of-words vectorization over a vocabulary frozen from training data.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::arff::{ArffError, AttributeDecl, AttributeKind, Dataset, Value, CLASS_ATTRIBUTE};
use crate::corpus::{preprocess, StopWordList, TokenizerConfig};

#[derive(Debug, Error)]
pub enum VectorizeError {
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("vocabulary is empty after tokenization and stop-word removal")]
    EmptyVocabulary,
    #[error("instance {row}: missing value for attribute '{attribute}'")]
    MissingValue { row: usize, attribute: String },
    #[error("invalid feature matrix: {0}")]
    Invalid(String),
    #[error(transparent)]
    Arff(#[from] ArffError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    Binary,
    #[default]
    Count,
    TfIdf,
}

impl Weighting {
    pub fn name(self) -> &'static str {
        match self {
            Weighting::Binary => "binary",
            Weighting::Count => "count",
            Weighting::TfIdf => "tfidf",
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Weighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary" => Ok(Weighting::Binary),
            "count" => Ok(Weighting::Count),
            "tfidf" => Ok(Weighting::TfIdf),
            other => Err(format!("unknown weighting '{other}' (expected binary, count or tfidf)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorizerConfig {
    pub tokenizer: TokenizerConfig,
    pub stopwords: StopWordList,
    /// Terms whose total training count is below this are dropped.
    pub min_term_freq: u32,
}

impl Default for VectorizerConfig {
    fn default() -> Self {
        VectorizerConfig {
            tokenizer: TokenizerConfig::default(),
            stopwords: StopWordList::roman_urdu(),
            min_term_freq: 1,
        }
    }
}

/// Sparse row: strictly increasing indices with their (non-zero) values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    /// Builds from `(index, value)` pairs; zeros are dropped, pairs sorted.
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        pairs.dedup_by_key(|p| p.0);
        let (indices, values) = pairs.into_iter().filter(|p| p.1 != 0.0).unzip();
        SparseVector { indices, values }
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        let (indices, values) = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .unzip();
        SparseVector { indices, values }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, index: usize) -> f64 {
        self.indices
            .binary_search(&index)
            .map_or(0.0, |p| self.values[p])
    }

    pub fn to_dense(&self, width: usize) -> Vec<f64> {
        let mut out = vec![0.0; width];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }
}

/// Numeric rows with parallel class labels (indices into `class_values`).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    width: usize,
    rows: Vec<SparseVector>,
    labels: Vec<usize>,
    class_values: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(
        width: usize,
        rows: Vec<SparseVector>,
        labels: Vec<usize>,
        class_values: Vec<String>,
    ) -> Result<Self, VectorizeError> {
        if rows.len() != labels.len() {
            return Err(VectorizeError::Invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if class_values.is_empty() {
            return Err(VectorizeError::Invalid("no class values".into()));
        }
        if let Some(l) = labels.iter().find(|&&l| l >= class_values.len()) {
            return Err(VectorizeError::Invalid(format!("label index {l} out of range")));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.indices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(VectorizeError::Invalid(format!("row {r}: indices not increasing")));
            }
            if row.indices.last().is_some_and(|&i| i >= width) {
                return Err(VectorizeError::Invalid(format!("row {r}: index beyond width {width}")));
            }
            if row.values.iter().any(|v| !v.is_finite()) {
                return Err(VectorizeError::Invalid(format!("row {r}: non-finite value")));
            }
        }
        Ok(FeatureMatrix {
            width,
            rows,
            labels,
            class_values,
        })
    }

    pub fn from_dense<S: Into<String>>(
        rows: &[Vec<f64>],
        labels: Vec<usize>,
        class_values: impl IntoIterator<Item = S>,
    ) -> Result<Self, VectorizeError> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(VectorizeError::Invalid("ragged dense rows".into()));
        }
        FeatureMatrix::new(
            width,
            rows.iter().map(|r| SparseVector::from_dense(r)).collect(),
            labels,
            class_values.into_iter().map(Into::into).collect(),
        )
    }

    /// Reads a numeric dataset: every non-class attribute must be numeric and
    /// no value may be missing.
    pub fn from_dataset(data: &Dataset) -> Result<Self, VectorizeError> {
        let ci = data
            .class_index()
            .ok_or_else(|| VectorizeError::Schema("dataset has no nominal class attribute".into()))?;
        let classes = data.class_values().expect("class is nominal").to_vec();
        let attrs = data.attributes();
        if let Some(a) = attrs
            .iter()
            .enumerate()
            .find(|(i, a)| *i != ci && a.kind != AttributeKind::Numeric)
        {
            return Err(VectorizeError::Schema(format!(
                "attribute '{}' is not numeric; vectorize text datasets first",
                a.1.name
            )));
        }
        let width = attrs.len() - 1;
        let mut rows = Vec::with_capacity(data.len());
        let mut labels = Vec::with_capacity(data.len());
        for (r, inst) in data.instances().iter().enumerate() {
            let mut pairs = Vec::new();
            for (a, v) in inst.iter().enumerate() {
                let feature = if a < ci { a } else { a.wrapping_sub(1) };
                match v {
                    Value::Missing => {
                        return Err(VectorizeError::MissingValue {
                            row: r,
                            attribute: attrs[a].name.clone(),
                        })
                    }
                    Value::Nominal(c) if a == ci => labels.push(*c),
                    Value::Numeric(x) => pairs.push((feature, *x)),
                    _ => unreachable!("schema checked above"),
                }
            }
            rows.push(SparseVector::from_pairs(pairs));
        }
        FeatureMatrix::new(width, rows, labels, classes)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SparseVector {
        &self.rows[i]
    }

    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        self.rows[i].to_dense(self.width)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.dense_row(i)).collect()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_values(&self) -> &[String] {
        &self.class_values
    }

    pub fn num_classes(&self) -> usize {
        self.class_values.len()
    }

    /// Instance count per class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_values.len()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> FeatureMatrix {
        let mut out = self.clone();
        for row in &mut out.rows {
            for v in &mut row.values {
                *v *= factor;
            }
        }
        out
    }

    pub fn select(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            width: self.width,
            rows: rows.iter().map(|&r| self.rows[r].clone()).collect(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            class_values: self.class_values.clone(),
        }
    }
}

/// Vocabulary and weighting learned from a training corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSpace {
    vocabulary: BTreeMap<String, usize>,
    terms: Vec<String>,
    weighting: Weighting,
    doc_count: usize,
    doc_frequency: Option<Vec<usize>>,
    config: VectorizerConfig,
    class_values: Vec<String>,
}

impl VectorSpace {
    /// Vocabulary = every distinct processed token of the training texts,
    /// sorted lexicographically; index = rank in that order.
    pub fn fit(train: &Dataset, weighting: Weighting, config: &VectorizerConfig) -> Result<Self, VectorizeError> {
        let docs = train.documents()?;
        let mut totals: BTreeMap<String, (u64, usize)> = BTreeMap::new();
        for doc in &docs {
            let tokens = preprocess(&doc.text, &config.tokenizer, &config.stopwords);
            let mut in_doc: BTreeMap<&str, u64> = BTreeMap::new();
            for t in &tokens {
                *in_doc.entry(t).or_default() += 1;
            }
            for (t, c) in in_doc {
                let entry = totals.entry(t.to_string()).or_default();
                entry.0 += c;
                entry.1 += 1;
            }
        }
        let min = u64::from(config.min_term_freq.max(1));
        let kept: Vec<(String, usize)> = totals
            .into_iter()
            .filter(|(_, (count, _))| *count >= min)
            .map(|(t, (_, df))| (t, df))
            .collect();
        if kept.is_empty() {
            return Err(VectorizeError::EmptyVocabulary);
        }
        let terms: Vec<String> = kept.iter().map(|(t, _)| t.clone()).collect();
        let vocabulary = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let doc_frequency = (weighting == Weighting::TfIdf).then(|| kept.iter().map(|(_, df)| *df).collect());
        Ok(VectorSpace {
            vocabulary,
            terms,
            weighting,
            doc_count: docs.len(),
            doc_frequency,
            config: config.clone(),
            class_values: train.class_values().expect("checked by documents").to_vec(),
        })
    }

    pub fn transform(&self, data: &Dataset) -> Result<FeatureMatrix, VectorizeError> {
        data.text_attribute()
            .map_err(|_| VectorizeError::Schema("expected a (string, nominal class) dataset".into()))?;
        let classes = data.class_values().expect("class present");
        if classes != self.class_values.as_slice() {
            return Err(VectorizeError::Schema(format!(
                "class values {:?} differ from the fitted {:?}",
                classes, self.class_values
            )));
        }
        let docs = data.documents()?;
        let mut rows = Vec::with_capacity(docs.len());
        let mut labels = Vec::with_capacity(docs.len());
        for doc in &docs {
            rows.push(self.vectorize_text(&doc.text));
            labels.push(classes.iter().position(|c| *c == doc.label).expect("declared label"));
        }
        FeatureMatrix::new(self.terms.len(), rows, labels, self.class_values.clone())
    }

    /// Weighted vector for one raw text; out-of-vocabulary tokens are ignored.
    pub fn vectorize_text(&self, text: &str) -> SparseVector {
        let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
        for t in preprocess(text, &self.config.tokenizer, &self.config.stopwords) {
            if let Some(&i) = self.vocabulary.get(&t) {
                *counts.entry(i).or_insert(0) += 1;
            }
        }
        let pairs = counts
            .into_iter()
            .map(|(i, c)| {
                let w = match self.weighting {
                    Weighting::Binary => 1.0,
                    Weighting::Count => f64::from(c),
                    Weighting::TfIdf => f64::from(c) * self.idf(i),
                };
                (i, w)
            })
            .collect();
        SparseVector::from_pairs(pairs)
    }

    /// `ln(doc_count / doc_frequency)`; 1 for non-tfidf spaces.
    pub fn idf(&self, index: usize) -> f64 {
        match &self.doc_frequency {
            Some(df) => libm::log(self.doc_count as f64 / df[index] as f64),
            None => 1.0,
        }
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.vocabulary.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn doc_frequency(&self) -> Option<&[usize]> {
        self.doc_frequency.as_deref()
    }

    pub fn config(&self) -> &VectorizerConfig {
        &self.config
    }

    pub fn class_values(&self) -> &[String] {
        &self.class_values
    }

    /// One term per line, in feature-index order.
    pub fn vocabulary_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(t);
            out.push('\n');
        }
        out
    }

    /// Numeric dataset with one attribute per term plus the class.
    pub fn to_arff(&self, matrix: &FeatureMatrix) -> Dataset {
        let mut attributes: Vec<AttributeDecl> = self.terms.iter().map(AttributeDecl::numeric).collect();
        attributes.push(AttributeDecl::nominal(CLASS_ATTRIBUTE, matrix.class_values().to_vec()));
        let width = self.terms.len();
        let instances = matrix
            .rows()
            .iter()
            .zip(matrix.labels())
            .map(|(row, &label)| {
                let mut values: Vec<Value> = row.to_dense(width).into_iter().map(Value::Numeric).collect();
                values.push(Value::Nominal(label));
                values
            })
            .collect();
        Dataset::new("bag_of_words", attributes, instances, Some(width))
            .expect("vectorized rows are well formed")
    }
}
