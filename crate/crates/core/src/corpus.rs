//! Text normalization (tokenize, lowercase, stop-word removal) and
//! train/test partitioning.

use std::collections::BTreeSet;
use std::path::Path;

use thiserror::Error;

use crate::arff::Dataset;
use crate::rng::SplitMix64;

/// Delimiters used when no tokenizer configuration is given.
pub const DEFAULT_DELIMITERS: &str = " \t\r\n.,;:'\"()?!";

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_roman_urdu.txt");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("tokenizer delimiter set is empty")]
    EmptyDelimiters,
    #[error("stop-word list line {line}: {message}")]
    StopWord { line: usize, message: String },
    #[error("cannot read stop-word file {}: {source}", path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    BadFraction(f64),
    #[error("cannot stratify: {0}")]
    Stratification(String),
    #[error("split of {total} instances with fraction {fraction} leaves an empty partition")]
    DegenerateSplit { total: usize, fraction: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    delimiters: BTreeSet<char>,
}

impl TokenizerConfig {
    pub fn new(delimiters: impl IntoIterator<Item = char>) -> Result<Self, CorpusError> {
        let delimiters: BTreeSet<char> = delimiters.into_iter().collect();
        if delimiters.is_empty() {
            return Err(CorpusError::EmptyDelimiters);
        }
        Ok(TokenizerConfig { delimiters })
    }

    pub fn delimiters(&self) -> impl Iterator<Item = char> + '_ {
        self.delimiters.iter().copied()
    }

    pub fn is_delimiter(&self, c: char) -> bool {
        self.delimiters.contains(&c)
    }
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            delimiters: DEFAULT_DELIMITERS.chars().collect(),
        }
    }
}

/// Splits on maximal runs of delimiter characters. Never yields empty tokens.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    text.split(|c| config.is_delimiter(c))
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Per-character lowercase mapping. Context-free, so lowercasing before or
/// after tokenization gives the same tokens.
pub fn lowercase_str(s: &str) -> String {
    s.chars().flat_map(char::to_lowercase).collect()
}

pub fn lowercase(tokens: &[String]) -> Vec<String> {
    tokens.iter().map(|t| lowercase_str(t)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StopWordList {
    words: BTreeSet<String>,
}

impl StopWordList {
    pub fn empty() -> Self {
        StopWordList::default()
    }

    /// Entries must already be lowercase and non-empty.
    pub fn from_words<S: AsRef<str>>(words: impl IntoIterator<Item = S>) -> Result<Self, CorpusError> {
        let mut set = BTreeSet::new();
        for (i, w) in words.into_iter().enumerate() {
            let w = w.as_ref();
            if w.is_empty() {
                return Err(CorpusError::StopWord {
                    line: i + 1,
                    message: "empty stop word".into(),
                });
            }
            if lowercase_str(w) != w {
                return Err(CorpusError::StopWord {
                    line: i + 1,
                    message: format!("'{w}' is not lowercase"),
                });
            }
            set.insert(w.to_string());
        }
        Ok(StopWordList { words: set })
    }

    /// Reads the plain-text list format: one word per line, blank lines and
    /// `#` comment lines ignored, entries lowercased on load.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut set = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let word = line.trim();
            if word.is_empty() || word.starts_with('#') {
                continue;
            }
            if word.chars().any(char::is_whitespace) {
                return Err(CorpusError::StopWord {
                    line: i + 1,
                    message: format!("'{word}' contains whitespace"),
                });
            }
            set.insert(lowercase_str(word));
        }
        Ok(StopWordList { words: set })
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The bundled Roman Urdu list (`data/stopwords_roman_urdu.txt`).
    pub fn roman_urdu() -> Self {
        Self::parse(DEFAULT_STOPWORDS).expect("bundled stop-word list is well formed")
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

/// Drops tokens found in `stops` (exact match), keeping order.
pub fn remove_stopwords(tokens: &[String], stops: &StopWordList) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stops.contains(t))
        .cloned()
        .collect()
}

/// tokenize → lowercase → remove stop words.
pub fn preprocess(text: &str, config: &TokenizerConfig, stops: &StopWordList) -> Vec<String> {
    tokenize(text, config)
        .into_iter()
        .map(|t| lowercase_str(&t))
        .filter(|t| !stops.contains(t))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub stratified: bool,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, stratified: bool, seed: u64) -> Result<Self, CorpusError> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(CorpusError::BadFraction(train_fraction));
        }
        Ok(SplitSpec {
            train_fraction,
            stratified,
            seed,
        })
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            stratified: true,
            seed: 42,
        }
    }
}

/// Instance indices of the train and test partitions, each ascending.
///
/// The overall train size is `round(fraction * n)`. When stratified, that
/// total is apportioned over classes by largest remainder (ties to the lower
/// class index), and each class's members are shuffled in class order from
/// one seeded stream before taking its quota.
pub fn split_indices(dataset: &Dataset, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>), CorpusError> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(CorpusError::BadFraction(spec.train_fraction));
    }
    let n = dataset.len();
    let n_train = (spec.train_fraction * n as f64).round() as usize;
    if n_train == 0 || n_train >= n {
        return Err(CorpusError::DegenerateSplit {
            total: n,
            fraction: spec.train_fraction,
        });
    }
    let mut rng = SplitMix64::new(spec.seed);
    let (mut train, mut test) = if spec.stratified {
        let classes = dataset
            .class_values()
            .ok_or_else(|| CorpusError::Stratification("dataset has no class attribute".into()))?;
        let labels = dataset.class_labels().expect("class attribute present");
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
        for (i, l) in labels.iter().enumerate() {
            let l = l.ok_or_else(|| {
                CorpusError::Stratification(format!("instance {i} has a missing class"))
            })?;
            groups[l].push(i);
        }
        if let Some(c) = groups.iter().position(Vec::is_empty) {
            return Err(CorpusError::Stratification(format!(
                "class '{}' has no instances",
                classes[c]
            )));
        }
        let exact: Vec<f64> = groups
            .iter()
            .map(|g| spec.train_fraction * g.len() as f64)
            .collect();
        let mut quotas: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
        let assigned: usize = quotas.iter().sum();
        let mut order: Vec<usize> = (0..groups.len())
            .filter(|&c| quotas[c] < groups[c].len())
            .collect();
        order.sort_by(|&a, &b| {
            let ra = exact[a] - quotas[a] as f64;
            let rb = exact[b] - quotas[b] as f64;
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &c in order.iter().take(n_train.saturating_sub(assigned)) {
            quotas[c] += 1;
        }
        let mut train = Vec::with_capacity(n_train);
        let mut test = Vec::with_capacity(n - n_train);
        for (group, quota) in groups.iter_mut().zip(quotas) {
            rng.shuffle(group);
            train.extend_from_slice(&group[..quota]);
            test.extend_from_slice(&group[quota..]);
        }
        (train, test)
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut all);
        let test = all.split_off(n_train);
        (all, test)
    };
    if train.is_empty() || test.is_empty() {
        return Err(CorpusError::DegenerateSplit {
            total: n,
            fraction: spec.train_fraction,
        });
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split(dataset: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset), CorpusError> {
    let (train, test) = split_indices(dataset, spec)?;
    Ok((dataset.select(&train), dataset.select(&test)))
}
