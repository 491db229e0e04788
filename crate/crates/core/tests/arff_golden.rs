use std::fs;
use std::path::PathBuf;

use sentikit_core::arff::{parse_arff, parse_arff_bytes, write_arff, write_arff_with, RowStyle};

fn golden() -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "arff"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn twenty_golden_files() {
    assert_eq!(golden().len(), 20);
}

#[test]
fn golden_round_trip_dense_and_sparse() {
    for (name, bytes) in golden() {
        let parsed = parse_arff_bytes(&bytes).unwrap_or_else(|e| panic!("{name}: {e}"));
        for style in [RowStyle::Dense, RowStyle::Sparse] {
            let text = write_arff_with(&parsed, style);
            let again = parse_arff(&text).unwrap_or_else(|e| panic!("{name} {style:?}: {e}\n{text}"));
            assert_eq!(again, parsed, "{name} {style:?}");
            assert_eq!(write_arff_with(&again, style), text, "{name} {style:?} not byte-stable");
        }
    }
}

#[test]
fn golden_writer_is_a_fixed_point() {
    for (name, bytes) in golden() {
        let once = write_arff(&parse_arff_bytes(&bytes).unwrap());
        let twice = write_arff(&parse_arff(&once).unwrap());
        assert_eq!(once, twice, "{name}");
    }
}

#[test]
fn golden_files_exercise_each_feature() {
    let all = golden();
    let text = |n: &str| String::from_utf8(all.iter().find(|(f, _)| f.starts_with(n)).unwrap().1.clone()).unwrap();
    assert!(text("03").contains('{'));
    assert!(text("04").contains("''"));
    assert!(text("05").starts_with('%'));
    assert!(text("06").contains('?'));
    let missing = parse_arff(&text("06")).unwrap();
    assert!(missing.has_missing());
}
