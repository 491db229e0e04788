//! Test-set scoring: confusion matrix, accuracy, precision, recall and
//! F-measure against one positive class.
//!
//! With more than two classes every non-positive class counts as negative
//! in the matrix, while `correct` still means "predicted the exact class".
//! For two classes `correct == tp + tn` and `incorrect == fp + fn`.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classifiers::{ClassifierError, Model};
use crate::vectorize::FeatureMatrix;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error("positive class '{class}' is not one of the declared classes ({})", declared.join(", "))]
    UnknownPositiveClass { class: String, declared: Vec<String> },
    #[error("test classes ({}) differ from the model's classes ({})", test.join(", "), model.join(", "))]
    ClassMismatch { model: Vec<String>, test: Vec<String> },
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("no models to compare")]
    NoModels,
}

/// Two-by-two counts indexed `[actual][predicted]`, index 0 being the positive class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub positive_class: String,
    pub counts: [[u64; 2]; 2],
}

impl ConfusionMatrix {
    pub fn new(positive_class: impl Into<String>) -> Self {
        ConfusionMatrix {
            positive_class: positive_class.into(),
            counts: [[0; 2]; 2],
        }
    }

    pub fn from_counts(positive_class: impl Into<String>, tp: u64, fn_: u64, fp: u64, tn: u64) -> Self {
        ConfusionMatrix {
            positive_class: positive_class.into(),
            counts: [[tp, fn_], [fp, tn]],
        }
    }

    pub fn record(&mut self, actual_positive: bool, predicted_positive: bool) {
        self.counts[usize::from(!actual_positive)][usize::from(!predicted_positive)] += 1;
    }

    pub fn tp(&self) -> u64 {
        self.counts[0][0]
    }

    pub fn fn_(&self) -> u64 {
        self.counts[0][1]
    }

    pub fn fp(&self) -> u64 {
        self.counts[1][0]
    }

    pub fn tn(&self) -> u64 {
        self.counts[1][1]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// The same counts seen from the other class.
    pub fn swapped(&self, new_positive: impl Into<String>) -> Self {
        ConfusionMatrix::from_counts(new_positive, self.tn(), self.fp(), self.fn_(), self.tp())
    }
}

/// `2pr / (p + r)`, or 0 when `p + r == 0`.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub model_name: String,
    pub total: u64,
    pub correct: u64,
    pub incorrect: u64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// Set when `tp + fp == 0`; precision is then reported as 0.
    pub precision_undefined: bool,
    /// Set when `tp + fn == 0`; recall is then reported as 0.
    pub recall_undefined: bool,
    pub matrix: ConfusionMatrix,
}

impl EvalReport {
    /// Builds a report from raw counts and a confusion matrix.
    pub fn from_counts(model_name: impl Into<String>, correct: u64, total: u64, matrix: ConfusionMatrix) -> Self {
        let (accuracy, _) = ratio(correct, total);
        let (precision, precision_undefined) = ratio(matrix.tp(), matrix.tp() + matrix.fp());
        let (recall, recall_undefined) = ratio(matrix.tp(), matrix.tp() + matrix.fn_());
        EvalReport {
            model_name: model_name.into(),
            total,
            correct,
            incorrect: total - correct,
            accuracy,
            precision,
            recall,
            f_measure: f_measure(precision, recall),
            precision_undefined,
            recall_undefined,
            matrix,
        }
    }

    /// Accuracy in percent, `correct * 100 / total` with one rounding.
    pub fn accuracy_percent(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            (self.correct * 100) as f64 / self.total as f64
        }
    }

    /// Orders by descending accuracy (compared exactly as fractions), then by name.
    pub fn rank_cmp(&self, other: &EvalReport) -> Ordering {
        let lhs = u128::from(self.correct) * u128::from(other.total.max(1));
        let rhs = u128::from(other.correct) * u128::from(self.total.max(1));
        rhs.cmp(&lhs).then_with(|| self.model_name.cmp(&other.model_name))
    }
}

/// `"pos"` when declared, otherwise the first class.
pub fn default_positive_class(class_values: &[String]) -> &str {
    class_values
        .iter()
        .find(|c| c.as_str() == "pos")
        .or(class_values.first())
        .map_or("", String::as_str)
}

/// Scores `model` on `test` under the display name `name`.
pub fn evaluate_named(name: &str, model: &Model, test: &FeatureMatrix, positive_class: &str) -> Result<EvalReport, EvalError> {
    if model.class_values() != test.class_values() {
        return Err(EvalError::ClassMismatch {
            model: model.class_values().to_vec(),
            test: test.class_values().to_vec(),
        });
    }
    let positive = test
        .class_values()
        .iter()
        .position(|c| c == positive_class)
        .ok_or_else(|| EvalError::UnknownPositiveClass {
            class: positive_class.to_string(),
            declared: test.class_values().to_vec(),
        })?;
    if test.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let predictions = model.predict_matrix(test)?;
    let mut matrix = ConfusionMatrix::new(positive_class);
    let mut correct = 0;
    for (&p, &a) in predictions.iter().zip(test.labels()) {
        matrix.record(a == positive, p == positive);
        correct += u64::from(p == a);
    }
    Ok(EvalReport::from_counts(name, correct, test.len() as u64, matrix))
}

/// Scores `model` on `test`, named after its algorithm.
pub fn evaluate(model: &Model, test: &FeatureMatrix, positive_class: &str) -> Result<EvalReport, EvalError> {
    evaluate_named(model.algorithm().display_name(), model, test, positive_class)
}

/// Evaluates every model (concurrently) and ranks the reports.
pub fn compare(models: &[Model], test: &FeatureMatrix, positive_class: &str) -> Result<Vec<EvalReport>, EvalError> {
    if models.is_empty() {
        return Err(EvalError::NoModels);
    }
    let mut reports = models
        .par_iter()
        .map(|m| evaluate(m, test, positive_class))
        .collect::<Result<Vec<_>, _>>()?;
    reports.sort_by(EvalReport::rank_cmp);
    Ok(reports)
}

fn render(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut out = String::new();
        for (i, (cell, w)) in cells.zip(&widths).enumerate() {
            let pad = w - cell.chars().count();
            if i == 0 {
                let _ = write!(out, "| {cell}{} ", " ".repeat(pad));
            } else {
                let _ = write!(out, "| {}{cell} ", " ".repeat(pad));
            }
        }
        out.push_str("|\n");
        out
    };
    let mut out = line(&mut header.iter().copied());
    out.push('|');
    for (i, w) in widths.iter().enumerate() {
        out.push_str(if i == 0 { ":" } else { "-" });
        out.push_str(&"-".repeat(*w));
        out.push_str(if i == 0 { "-|" } else { ":|" });
    }
    out.push('\n');
    for row in rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
    }
    out
}

fn two(v: f64) -> String {
    format!("{v:.2}")
}

/// Accuracy table: classifier, total, correct, incorrect, accuracy in percent.
pub fn accuracy_table(reports: &[EvalReport]) -> String {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.model_name.clone(),
                r.total.to_string(),
                r.correct.to_string(),
                r.incorrect.to_string(),
                two(r.accuracy_percent()),
            ]
        })
        .collect();
    render(
        &["Classifier", "Total Testing Reviews", "Correctly Classified", "Incorrectly Classified", "Accuracy (%)"],
        &rows,
    )
}

/// Precision, recall and F-measure per classifier.
pub fn measures_table(reports: &[EvalReport]) -> String {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| vec![r.model_name.clone(), two(r.precision), two(r.recall), two(r.f_measure)])
        .collect();
    render(&["Classifier", "Precision", "Recall", "F-Measure"], &rows)
}

/// Both tables' columns in one.
pub fn combined_table(reports: &[EvalReport]) -> String {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.model_name.clone(),
                r.total.to_string(),
                r.correct.to_string(),
                r.incorrect.to_string(),
                two(r.accuracy_percent()),
                two(r.precision),
                two(r.recall),
                two(r.f_measure),
            ]
        })
        .collect();
    render(
        &[
            "Classifier",
            "Total",
            "Correct",
            "Incorrect",
            "Accuracy (%)",
            "Precision",
            "Recall",
            "F-Measure",
        ],
        &rows,
    )
}
