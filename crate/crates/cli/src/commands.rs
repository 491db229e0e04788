use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use sentikit_core::arff::{load_text_directory, parse_arff_bytes, write_arff_with, RowStyle};
use sentikit_core::classifiers::{train, Algorithm, Model};
use sentikit_core::corpus::{split, SplitSpec, StopWordList, TokenizerConfig};
use sentikit_core::eval::{accuracy_table, combined_table, default_positive_class, evaluate, measures_table, EvalReport};
use sentikit_core::synth::{generate, write_corpus_dir, SynthConfig};
use sentikit_core::vectorize::{FeatureMatrix, VectorSpace, VectorizerConfig};
use sentikit_core::Dataset;
use serde_json::json;

use crate::args::{
    Command, CompareArgs, ConvertArgs, EvaluateArgs, GenerateArgs, SplitArgs, TextArgs, TrainArgs, VectorizeArgs,
};
use crate::output::{self, path_json, train_config_json, write_atomic, write_json, Report};
use crate::CliError;

type Out<'a> = &'a mut dyn Write;

macro_rules! say {
    ($w:expr, $($t:tt)*) => {
        let _ = writeln!($w, $($t)*);
    };
}

pub fn dispatch(command: Command, out: Out, err: Out) -> Result<(), CliError> {
    match command {
        Command::Convert(a) => convert(a, out),
        Command::Generate(a) => generate_cmd(a, out),
        Command::Split(a) => split_cmd(a, out),
        Command::Vectorize(a) => vectorize(a, out, err),
        Command::Train(a) => train_cmd(a, out),
        Command::Evaluate(a) => evaluate_cmd(a, out),
        Command::Compare(a) => compare_cmd(a, out, err),
    }
}

fn load_arff(path: &Path) -> Result<Dataset, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_arff_bytes(&bytes).map_err(|e| CliError::from(e).at(path))
}

fn load_matrix(path: &Path) -> Result<FeatureMatrix, CliError> {
    let ds = load_arff(path)?;
    if ds.text_attribute().is_ok() {
        return Err(CliError::data(format!(
            "{} holds raw text; run `sentikit vectorize` first",
            path.display()
        )));
    }
    FeatureMatrix::from_dataset(&ds).map_err(|e| CliError::from(e).at(path))
}

fn class_summary(ds: &Dataset) -> String {
    let (Some(values), Some(labels)) = (ds.class_values(), ds.class_labels()) else {
        return String::from("no class attribute");
    };
    let mut counts = vec![0usize; values.len()];
    for l in labels.into_iter().flatten() {
        counts[l] += 1;
    }
    values
        .iter()
        .zip(counts)
        .map(|(v, n)| format!("{v}: {n}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn write_manifest(output: &Path, command: &str, config: serde_json::Value) -> Result<(), CliError> {
    write_json(&output::manifest_path(output), &output::manifest(command, config))
}

fn convert(a: ConvertArgs, out: Out) -> Result<(), CliError> {
    let ds = load_text_directory(&a.input_dir)?;
    write_atomic(&a.output, write_arff_with(&ds, RowStyle::Dense).as_bytes())?;
    write_manifest(
        &a.output,
        "convert",
        json!({ "input_dir": path_json(&a.input_dir), "output": path_json(&a.output) }),
    )?;
    say!(out, "wrote {} instances ({}) to {}", ds.len(), class_summary(&ds), a.output.display());
    Ok(())
}

fn generate_cmd(a: GenerateArgs, out: Out) -> Result<(), CliError> {
    let cfg = SynthConfig {
        docs_per_class: a.docs_per_class,
        noise: a.noise,
        seed: a.seed,
        ..SynthConfig::default()
    };
    if a.docs_per_class == 0 {
        return Err(CliError::usage("--docs-per-class must be at least 1"));
    }
    let docs = generate(&cfg).map_err(CliError::usage)?;
    if a.output_dir.exists() {
        let mut entries = fs::read_dir(&a.output_dir).map_err(|e| CliError::io(&a.output_dir, e))?;
        if entries.next().is_some() {
            return Err(CliError::data(format!(
                "{} is not empty; refusing to mix corpora",
                a.output_dir.display()
            )));
        }
    }
    write_corpus_dir(&a.output_dir, &docs).map_err(|e| CliError::io(&a.output_dir, e))?;
    write_json(
        &a.output_dir.join("manifest.json"),
        &output::manifest(
            "generate",
            json!({
                "output_dir": path_json(&a.output_dir),
                "docs_per_class": cfg.docs_per_class,
                "sentiment_words": [cfg.sentiment_words.0, cfg.sentiment_words.1],
                "filler_words": [cfg.filler_words.0, cfg.filler_words.1],
                "stop_words": [cfg.stop_words.0, cfg.stop_words.1],
                "noise": cfg.noise,
                "seed": cfg.seed,
            }),
        ),
    )?;
    say!(out, "wrote {} reviews to {}", docs.len(), a.output_dir.display());
    Ok(())
}

fn split_cmd(a: SplitArgs, out: Out) -> Result<(), CliError> {
    let spec = SplitSpec::new(a.train_fraction, !a.no_stratify, a.seed)?;
    let ds = load_arff(&a.input)?;
    let (train_ds, test_ds) = split(&ds, &spec)?;
    let style = if ds.text_attribute().is_ok() { RowStyle::Dense } else { RowStyle::Sparse };
    write_atomic(&a.train_out, write_arff_with(&train_ds, style).as_bytes())?;
    write_atomic(&a.test_out, write_arff_with(&test_ds, style).as_bytes())?;
    let config = json!({
        "input": path_json(&a.input),
        "train_out": path_json(&a.train_out),
        "test_out": path_json(&a.test_out),
        "train_fraction": a.train_fraction,
        "stratified": !a.no_stratify,
        "seed": a.seed,
    });
    write_manifest(&a.train_out, "split", config)?;
    say!(out, "train: {} instances ({})", train_ds.len(), class_summary(&train_ds));
    say!(out, "test: {} instances ({})", test_ds.len(), class_summary(&test_ds));
    Ok(())
}

fn vectorizer_config(t: &TextArgs) -> Result<VectorizerConfig, CliError> {
    let stopwords = if t.no_stopwords {
        StopWordList::empty()
    } else if let Some(p) = &t.stopwords {
        StopWordList::load(p)?
    } else {
        StopWordList::roman_urdu()
    };
    Ok(VectorizerConfig {
        tokenizer: TokenizerConfig::default(),
        stopwords,
        min_term_freq: t.min_term_freq,
    })
}

fn text_config_json(t: &TextArgs) -> serde_json::Value {
    let stopwords = if t.no_stopwords {
        json!("none")
    } else {
        t.stopwords.as_deref().map_or(json!("roman_urdu"), path_json)
    };
    json!({
        "weighting": t.weighting.name(),
        "stopwords": stopwords,
        "min_term_freq": t.min_term_freq,
    })
}

fn warn_empty_rows(matrix: &FeatureMatrix, what: &str, err: Out) {
    let empty = matrix.rows().iter().filter(|r| r.nnz() == 0).count();
    if empty > 0 {
        say!(
            err,
            "warning: {empty} of {} {what} instances contain no vocabulary term and become all-zero vectors",
            matrix.len()
        );
    }
}

fn vectorize(a: VectorizeArgs, out: Out, err: Out) -> Result<(), CliError> {
    let cfg = vectorizer_config(&a.text)?;
    let train_ds = load_arff(&a.train)?;
    let space = VectorSpace::fit(&train_ds, a.text.weighting, &cfg).map_err(|e| CliError::from(e).at(&a.train))?;
    let style = if a.dense { RowStyle::Dense } else { RowStyle::Sparse };
    let train_m = space.transform(&train_ds)?;
    write_atomic(&a.out_train, write_arff_with(&space.to_arff(&train_m), style).as_bytes())?;
    write_atomic(&a.vocab, space.vocabulary_text().as_bytes())?;
    let mut test_written = None;
    if let (Some(test), Some(out_test)) = (&a.test, &a.out_test) {
        let test_ds = load_arff(test)?;
        let test_m = space.transform(&test_ds).map_err(|e| CliError::from(e).at(test))?;
        warn_empty_rows(&test_m, "test", err);
        write_atomic(out_test, write_arff_with(&space.to_arff(&test_m), style).as_bytes())?;
        test_written = Some((test_m.len(), out_test));
    }
    let config = json!({
        "train": path_json(&a.train),
        "test": a.test.as_deref().map(path_json),
        "out_train": path_json(&a.out_train),
        "out_test": a.out_test.as_deref().map(path_json),
        "vocab": path_json(&a.vocab),
        "dense": a.dense,
        "text": text_config_json(&a.text),
    });
    write_manifest(&a.out_train, "vectorize", config)?;
    say!(out, "vocabulary: {} terms ({} weighting)", space.len(), space.weighting());
    say!(out, "wrote {} training vectors to {}", train_m.len(), a.out_train.display());
    if let Some((n, path)) = test_written {
        say!(out, "wrote {n} test vectors to {}", path.display());
    }
    Ok(())
}

fn train_cmd(a: TrainArgs, out: Out) -> Result<(), CliError> {
    let cfg = a.hyper.config();
    let matrix = load_matrix(&a.train)?;
    let start = Instant::now();
    let model = train(a.algorithm, &matrix, &cfg)?;
    let elapsed = start.elapsed();
    let accuracy = model.accuracy_on(&matrix)?;
    output::save_model(&a.model_out, &model)?;
    write_manifest(
        &a.model_out,
        "train",
        json!({
            "train": path_json(&a.train),
            "algorithm": a.algorithm.name(),
            "model_out": path_json(&a.model_out),
            "hyperparameters": train_config_json(&cfg),
        }),
    )?;
    say!(
        out,
        "trained {} on {} instances in {:.3} s",
        a.algorithm.display_name(),
        matrix.len(),
        elapsed.as_secs_f64()
    );
    say!(out, "training accuracy: {:.2}%", accuracy * 100.0);
    say!(out, "model written to {}", a.model_out.display());
    Ok(())
}

fn load_model(path: &Path) -> Result<Model, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Model::from_text(&text).map_err(|e| CliError::from(e).at(path))
}

fn resolve_positive(requested: Option<&str>, classes: &[String]) -> Result<String, CliError> {
    match requested {
        Some(c) if classes.iter().any(|v| v == c) => Ok(c.to_string()),
        Some(c) => Err(CliError::usage(format!(
            "positive class '{c}' is not declared; classes are: {}",
            classes.join(", ")
        ))),
        None => Ok(default_positive_class(classes).to_string()),
    }
}

fn evaluate_cmd(a: EvaluateArgs, out: Out) -> Result<(), CliError> {
    let model = load_model(&a.model)?;
    let test = load_matrix(&a.test)?;
    if test.width() != model.feature_width() {
        return Err(CliError::data(format!(
            "{} has {} features but the model expects {}; vectorize the test set together with the training set \
             (`sentikit vectorize TRAIN --test TEST ...`) so both share one vocabulary",
            a.test.display(),
            test.width(),
            model.feature_width()
        )));
    }
    let positive = resolve_positive(a.positive_class.as_deref(), test.class_values())?;
    let report = evaluate(&model, &test, &positive)?;
    let report_path = a.report.clone().unwrap_or_else(|| {
        let name = a.model.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        a.model.with_file_name(format!("{name}.report.json"))
    });
    let reports = [report];
    write_json(&report_path, &Report::new(&positive, test.len(), &reports))?;
    write_manifest(
        &report_path,
        "evaluate",
        json!({
            "model": path_json(&a.model),
            "test": path_json(&a.test),
            "positive_class": positive,
            "report": path_json(&report_path),
        }),
    )?;
    let _ = write!(out, "{}", combined_table(&reports));
    say!(out, "report written to {}", report_path.display());
    Ok(())
}

struct Prepared {
    train: FeatureMatrix,
    test: FeatureMatrix,
    vocabulary: Option<String>,
}

fn prepare(a: &CompareArgs, err: Out) -> Result<Prepared, CliError> {
    let train_ds = load_arff(&a.train)?;
    let test_ds = load_arff(&a.test)?;
    match (train_ds.text_attribute().is_ok(), test_ds.text_attribute().is_ok()) {
        (true, true) => {
            let cfg = vectorizer_config(&a.text)?;
            let space =
                VectorSpace::fit(&train_ds, a.text.weighting, &cfg).map_err(|e| CliError::from(e).at(&a.train))?;
            let train = space.transform(&train_ds)?;
            let test = space.transform(&test_ds).map_err(|e| CliError::from(e).at(&a.test))?;
            warn_empty_rows(&test, "test", err);
            Ok(Prepared {
                train,
                test,
                vocabulary: Some(space.vocabulary_text()),
            })
        }
        (false, false) => {
            let train = FeatureMatrix::from_dataset(&train_ds).map_err(|e| CliError::from(e).at(&a.train))?;
            let test = FeatureMatrix::from_dataset(&test_ds).map_err(|e| CliError::from(e).at(&a.test))?;
            if train.width() != test.width() {
                return Err(CliError::data(format!(
                    "training set has {} features but the test set has {}; vectorize both with one vocabulary",
                    train.width(),
                    test.width()
                )));
            }
            Ok(Prepared {
                train,
                test,
                vocabulary: None,
            })
        }
        _ => Err(CliError::data(
            "one input holds raw text and the other numeric vectors; pass two text files or two vectorized files",
        )),
    }
}

fn compare_cmd(a: CompareArgs, out: Out, err: Out) -> Result<(), CliError> {
    let cfg = a.hyper.config();
    let mut algorithms: Vec<Algorithm> = Vec::new();
    for alg in if a.algorithms.is_empty() { Algorithm::ALL.to_vec() } else { a.algorithms.clone() } {
        if !algorithms.contains(&alg) {
            algorithms.push(alg);
        }
    }
    let data = prepare(&a, err)?;
    if data.train.class_values() != data.test.class_values() {
        return Err(CliError::data(format!(
            "class values differ: training [{}], test [{}]",
            data.train.class_values().join(", "),
            data.test.class_values().join(", ")
        )));
    }
    let positive = resolve_positive(a.positive_class.as_deref(), data.test.class_values())?;

    let trained: Vec<(Algorithm, Result<Model, CliError>, Duration)> = algorithms
        .par_iter()
        .map(|&alg| {
            let start = Instant::now();
            let model = train(alg, &data.train, &cfg).map_err(CliError::from);
            (alg, model, start.elapsed())
        })
        .collect();

    let models_dir = a.out_dir.join("models");
    let mut reports: Vec<EvalReport> = Vec::new();
    let mut failures: Vec<CliError> = Vec::new();
    for (alg, model, elapsed) in trained {
        let outcome = model.and_then(|m| {
            output::save_model(&models_dir.join(format!("{}.model", alg.name())), &m)?;
            Ok(evaluate(&m, &data.test, &positive)?)
        });
        match outcome {
            Ok(r) => {
                say!(err, "{}: trained in {:.3} s", alg.name(), elapsed.as_secs_f64());
                reports.push(r);
            }
            Err(e) => {
                say!(err, "{}: failed: {e}", alg.name());
                failures.push(CliError {
                    kind: e.kind,
                    message: format!("{}: {}", alg.name(), e.message),
                });
            }
        }
    }
    reports.sort_by(EvalReport::rank_cmp);

    if let Some(vocab) = &data.vocabulary {
        write_atomic(&a.out_dir.join("vocabulary.txt"), vocab.as_bytes())?;
    }
    if !reports.is_empty() {
        let accuracy = accuracy_table(&reports);
        let measures = measures_table(&reports);
        write_json(&a.out_dir.join("report.json"), &Report::new(&positive, data.test.len(), &reports))?;
        write_atomic(&a.out_dir.join("accuracy.md"), accuracy.as_bytes())?;
        write_atomic(&a.out_dir.join("measures.md"), measures.as_bytes())?;
        write_atomic(&a.out_dir.join("combined.md"), combined_table(&reports).as_bytes())?;
        let _ = write!(out, "{accuracy}\n{measures}");
    }
    write_json(
        &a.out_dir.join("manifest.json"),
        &output::manifest(
            "compare",
            json!({
                "train": path_json(&a.train),
                "test": path_json(&a.test),
                "out_dir": path_json(&a.out_dir),
                "algorithms": algorithms.iter().map(|a| a.name()).collect::<Vec<_>>(),
                "positive_class": positive,
                "text": data.vocabulary.as_ref().map(|_| text_config_json(&a.text)),
                "hyperparameters": train_config_json(&cfg),
            }),
        ),
    )?;

    match failures.len() {
        0 => Ok(()),
        _ => {
            let kind = if failures.iter().all(|f| f.kind == crate::ErrorKind::Usage) {
                crate::ErrorKind::Usage
            } else {
                crate::ErrorKind::Data
            };
            let detail = failures.iter().map(|f| f.message.as_str()).collect::<Vec<_>>().join("; ");
            Err(CliError {
                kind,
                message: format!("{} of {} classifiers failed: {detail}", failures.len(), algorithms.len()),
            })
        }
    }
}
