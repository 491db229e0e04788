use std::collections::BTreeSet;

use proptest::prelude::*;
use sentikit_core::arff::{Dataset, Document};
use sentikit_core::corpus::{
    lowercase, lowercase_str, remove_stopwords, split, split_indices, tokenize, SplitSpec, StopWordList,
    TokenizerConfig,
};

fn text() -> impl Strategy<Value = String> {
    prop_oneof![
        "[A-Za-z .,;:!?'\"()\t\n]{0,60}",
        any::<String>(),
        // Letters whose lowercase form is context dependent or expands.
        "[ΣσςİIiẞß Ǆǅ.]{0,20}",
    ]
}

fn docs() -> impl Strategy<Value = Vec<Document>> {
    prop::collection::vec(
        ("[a-z ]{0,12}", prop_oneof![Just("neg"), Just("pos"), Just("mid")]),
        2..60,
    )
    .prop_map(|v| {
        v.into_iter()
            .map(|(text, label)| Document {
                text,
                label: label.to_string(),
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn lowercase_commutes_with_tokenize(s in text()) {
        let cfg = TokenizerConfig::default();
        prop_assert_eq!(lowercase(&tokenize(&s, &cfg)), tokenize(&lowercase_str(&s), &cfg));
    }

    #[test]
    fn tokens_are_non_empty_and_delimiter_free(s in text()) {
        let cfg = TokenizerConfig::default();
        for t in tokenize(&s, &cfg) {
            prop_assert!(!t.is_empty());
            prop_assert!(!t.chars().any(|c| cfg.is_delimiter(c)));
        }
    }

    #[test]
    fn stopword_removal_is_idempotent(
        tokens in prop::collection::vec("[a-z]{1,4}", 0..30),
        stops in prop::collection::vec("[a-z]{1,4}", 0..10),
    ) {
        let list = StopWordList::from_words(&stops).unwrap();
        let once = remove_stopwords(&tokens, &list);
        prop_assert_eq!(remove_stopwords(&once, &list), once.clone());
        prop_assert!(once.iter().all(|t| !list.contains(t)));
        let bundled = StopWordList::roman_urdu();
        let once = remove_stopwords(&tokens, &bundled);
        prop_assert_eq!(remove_stopwords(&once, &bundled), once);
    }

    #[test]
    fn split_partitions_the_dataset(
        docs in docs(),
        fraction in 0.05f64..0.95,
        stratified in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let ds = Dataset::from_documents("p", vec!["neg".into(), "pos".into(), "mid".into()], &docs).unwrap();
        let spec = SplitSpec::new(fraction, stratified, seed).unwrap();
        match split_indices(&ds, &spec) {
            Ok((train, test)) => {
                let a: BTreeSet<usize> = train.iter().copied().collect();
                let b: BTreeSet<usize> = test.iter().copied().collect();
                prop_assert_eq!(a.len(), train.len());
                prop_assert_eq!(b.len(), test.len());
                prop_assert!(a.is_disjoint(&b));
                prop_assert_eq!(a.union(&b).copied().collect::<Vec<_>>(), (0..ds.len()).collect::<Vec<_>>());
                prop_assert_eq!(train.len(), (fraction * ds.len() as f64).round() as usize);
                let (tr, te) = split(&ds, &spec).unwrap();
                prop_assert_eq!(tr.len() + te.len(), ds.len());
                // Same seed, same partition.
                prop_assert_eq!(split_indices(&ds, &spec).unwrap(), (train, test));
            }
            Err(e) => {
                // Only degenerate sizes or an empty declared class may fail.
                let msg = e.to_string();
                prop_assert!(msg.contains("empty") || msg.contains("stratify"), "{}", msg);
            }
        }
    }
}
