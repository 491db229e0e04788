//! Seeded generator for a synthetic Roman Urdu car-review corpus.
//!
//! Each review mixes a few polarity words from its own class's pool with
//! neutral car vocabulary and stop words, in shuffled order. Polarity words
//! follow a Zipf-like law (the word at rank `r` has weight `1 / (r + 1)`),
//! so a handful of them are common; the other pools are drawn uniformly. With
//! probability `noise` it also gets one word from the opposite pool; since
//! every review carries at least two words of its own polarity, the classes
//! stay separable by word counts.
//!
//! Draw order for one review: sentiment count, each sentiment word, the
//! noise decision (and word), filler count, each filler word, stop-word
//! count, each stop word, then the shuffle. Reviews are generated class by
//! class (`neg` first) from one stream seeded with `seed`.

use std::fs;
use std::io;
use std::path::Path;

use crate::arff::{ArffError, Dataset, Document};
use crate::rng::SplitMix64;

pub const POSITIVE_WORDS: &[&str] = &[
    "acha", "achi", "zabardast", "behtreen", "kamal", "shandar", "umda", "lajawab", "aala", "pasand", "khoob", "mazedar",
];

pub const NEGATIVE_WORDS: &[&str] = &[
    "kharab", "bakwas", "mehnga", "ganda", "bekar", "ghatia", "bura", "buri", "nakara", "fazool", "pareshan", "masla",
];

pub const NEUTRAL_WORDS: &[&str] = &[
    "gari", "engine", "mileage", "model", "price", "seat", "interior", "suspension", "ac", "rang", "body", "tyre",
    "brake", "awaz", "safar", "shehar", "sarak", "petrol", "cng", "honda", "suzuki", "toyota", "civic", "corolla",
    "mehran", "cultus", "alto", "city", "showroom", "service", "parts", "dealer", "saal", "din", "mahina", "driver",
    "family", "raftar", "gear", "steering",
];

/// Function words drawn into reviews; all are on the bundled stop-word list.
pub const FUNCTION_WORDS: &[&str] = &[
    "hai", "ka", "ki", "ke", "ye", "mein", "se", "aur", "bhi", "to", "ko", "par", "tha", "thi", "meri", "hamari",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub docs_per_class: usize,
    /// Inclusive range of own-polarity words per review; the lower bound must be at least 2.
    pub sentiment_words: (usize, usize),
    pub filler_words: (usize, usize),
    pub stop_words: (usize, usize),
    /// Probability of one extra opposite-polarity word.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            docs_per_class: 1000,
            sentiment_words: (2, 4),
            filler_words: (3, 7),
            stop_words: (2, 5),
            noise: 0.1,
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), String> {
        let ranges = [
            ("sentiment_words", self.sentiment_words),
            ("filler_words", self.filler_words),
            ("stop_words", self.stop_words),
        ];
        for (name, (lo, hi)) in ranges {
            if lo > hi {
                return Err(format!("{name}: lower bound {lo} exceeds upper bound {hi}"));
            }
        }
        if self.sentiment_words.0 < 2 {
            return Err("sentiment_words must start at 2 or more".into());
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(format!("noise must lie in [0, 1], got {}", self.noise));
        }
        Ok(())
    }
}

fn count(rng: &mut SplitMix64, (lo, hi): (usize, usize)) -> usize {
    lo + rng.below(hi - lo + 1)
}

fn pick<'a>(rng: &mut SplitMix64, pool: &[&'a str]) -> &'a str {
    pool[rng.below(pool.len())]
}

fn pick_zipf<'a>(rng: &mut SplitMix64, pool: &[&'a str]) -> &'a str {
    let total: f64 = (1..=pool.len()).map(|r| 1.0 / r as f64).sum();
    let mut u = rng.next_f64() * total;
    for (r, word) in pool.iter().enumerate() {
        u -= 1.0 / (r + 1) as f64;
        if u < 0.0 {
            return word;
        }
    }
    pool[pool.len() - 1]
}

fn review(rng: &mut SplitMix64, own: &[&str], other: &[&str], cfg: &SynthConfig) -> String {
    let mut words: Vec<&str> = Vec::new();
    for _ in 0..count(rng, cfg.sentiment_words) {
        words.push(pick_zipf(rng, own));
    }
    if rng.next_f64() < cfg.noise {
        words.push(pick_zipf(rng, other));
    }
    for _ in 0..count(rng, cfg.filler_words) {
        words.push(pick(rng, NEUTRAL_WORDS));
    }
    for _ in 0..count(rng, cfg.stop_words) {
        words.push(pick(rng, FUNCTION_WORDS));
    }
    rng.shuffle(&mut words);
    let mut text = words.join(" ");
    if let Some(first) = text.get(..1) {
        let upper = first.to_ascii_uppercase();
        text.replace_range(..1, &upper);
    }
    text.push('.');
    text
}

/// Generates `2 * docs_per_class` labelled reviews, `neg` ones first.
pub fn generate(cfg: &SynthConfig) -> Result<Vec<Document>, String> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let mut docs = Vec::with_capacity(2 * cfg.docs_per_class);
    for (label, own, other) in [("neg", NEGATIVE_WORDS, POSITIVE_WORDS), ("pos", POSITIVE_WORDS, NEGATIVE_WORDS)] {
        for _ in 0..cfg.docs_per_class {
            docs.push(Document {
                text: review(&mut rng, own, other, cfg),
                label: label.to_string(),
            });
        }
    }
    Ok(docs)
}

/// The generated corpus as a (`text`, class) dataset.
pub fn generate_dataset(cfg: &SynthConfig) -> Result<Dataset, ArffError> {
    let docs = generate(cfg).map_err(ArffError::Invalid)?;
    Dataset::from_documents("synthetic_reviews", vec!["neg".into(), "pos".into()], &docs)
}

/// Writes `root/<label>/<label>_<nnnn>.txt`, one review per file.
pub fn write_corpus_dir(root: &Path, docs: &[Document]) -> io::Result<()> {
    let mut counters = std::collections::BTreeMap::<&str, usize>::new();
    for d in docs {
        let dir = root.join(&d.label);
        fs::create_dir_all(&dir)?;
        let n = counters.entry(d.label.as_str()).or_default();
        fs::write(dir.join(format!("{}_{:04}.txt", d.label, n)), &d.text)?;
        *n += 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{preprocess, StopWordList, TokenizerConfig};

    #[test]
    fn deterministic_and_sized() {
        let cfg = SynthConfig {
            docs_per_class: 25,
            ..SynthConfig::default()
        };
        let a = generate(&cfg).unwrap();
        assert_eq!(a, generate(&cfg).unwrap());
        assert_eq!(a.len(), 50);
        assert!(a[..25].iter().all(|d| d.label == "neg"));
        let b = generate(&SynthConfig { seed: 7, ..cfg }).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn function_words_are_stop_words_and_pools_disjoint() {
        let stops = StopWordList::roman_urdu();
        assert!(FUNCTION_WORDS.iter().all(|w| stops.contains(w)));
        for pool in [POSITIVE_WORDS, NEGATIVE_WORDS, NEUTRAL_WORDS] {
            assert!(pool.iter().all(|w| !stops.contains(w)), "{pool:?}");
        }
        assert!(POSITIVE_WORDS.iter().all(|w| !NEGATIVE_WORDS.contains(w) && !NEUTRAL_WORDS.contains(w)));
        assert!(NEGATIVE_WORDS.iter().all(|w| !NEUTRAL_WORDS.contains(w)));
    }

    #[test]
    fn own_polarity_dominates() {
        let docs = generate(&SynthConfig {
            docs_per_class: 200,
            noise: 1.0,
            ..SynthConfig::default()
        })
        .unwrap();
        let tok = TokenizerConfig::default();
        let stops = StopWordList::roman_urdu();
        for d in docs {
            let tokens = preprocess(&d.text, &tok, &stops);
            let pos = tokens.iter().filter(|t| POSITIVE_WORDS.contains(&t.as_str())).count();
            let neg = tokens.iter().filter(|t| NEGATIVE_WORDS.contains(&t.as_str())).count();
            assert!(if d.label == "pos" { pos > neg } else { neg > pos }, "{}", d.text);
        }
    }

    #[test]
    fn bad_config() {
        let bad = SynthConfig {
            sentiment_words: (1, 3),
            ..SynthConfig::default()
        };
        assert!(generate(&bad).is_err());
    }
}
