//! Python bindings: train, predict, evaluate and compare from ARFF files or
//! in-memory review lists.

use std::fs;
use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use sentikit_core::arff::parse_arff_bytes;
use sentikit_core::eval::{default_positive_class, evaluate_named, EvalReport};
use sentikit_core::{Algorithm, Dataset, Document, FeatureMatrix, Model, TrainConfig, VectorSpace, VectorizerConfig, Weighting};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn load(path: &PathBuf) -> PyResult<Dataset> {
    let bytes = fs::read(path).map_err(|e| PyOSError::new_err(format!("{}: {e}", path.display())))?;
    parse_arff_bytes(&bytes).map_err(|e| value_error(format!("{}: {e}", path.display())))
}

fn config(seed: u64) -> TrainConfig {
    TrainConfig {
        seed,
        ..TrainConfig::default()
    }
}

fn report_dict<'py>(py: Python<'py>, r: &EvalReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("classifier", &r.model_name)?;
    d.set_item("total", r.total)?;
    d.set_item("correct", r.correct)?;
    d.set_item("incorrect", r.incorrect)?;
    d.set_item("accuracy", r.accuracy)?;
    d.set_item("precision", r.precision)?;
    d.set_item("recall", r.recall)?;
    d.set_item("f_measure", r.f_measure)?;
    d.set_item("positive_class", &r.matrix.positive_class)?;
    d.set_item("confusion", r.matrix.counts)?;
    Ok(d)
}

fn positive(requested: Option<String>, classes: &[String]) -> PyResult<String> {
    match requested {
        Some(c) if classes.contains(&c) => Ok(c),
        Some(c) => Err(value_error(format!("positive class '{c}' is not one of {classes:?}"))),
        None => Ok(default_positive_class(classes).to_string()),
    }
}

/// A trained model, plus the vocabulary when it was trained on text.
#[pyclass(module = "sentikit", frozen)]
struct Classifier {
    space: Option<VectorSpace>,
    model: Model,
}

impl Classifier {
    fn fit(data: &Dataset, algorithm: &str, seed: u64, weighting: &str) -> PyResult<Classifier> {
        let algorithm: Algorithm = algorithm.parse().map_err(value_error)?;
        let (space, matrix) = if data.text_attribute().is_ok() {
            let weighting: Weighting = weighting.parse().map_err(value_error)?;
            let space = VectorSpace::fit(data, weighting, &VectorizerConfig::default()).map_err(value_error)?;
            let matrix = space.transform(data).map_err(value_error)?;
            (Some(space), matrix)
        } else {
            (None, FeatureMatrix::from_dataset(data).map_err(value_error)?)
        };
        let model = sentikit_core::train(algorithm, &matrix, &config(seed)).map_err(value_error)?;
        Ok(Classifier { space, model })
    }

    fn matrix(&self, data: &Dataset) -> PyResult<FeatureMatrix> {
        match &self.space {
            Some(space) => space.transform(data).map_err(value_error),
            None => FeatureMatrix::from_dataset(data).map_err(value_error),
        }
    }
}

#[pymethods]
impl Classifier {
    /// Trains on an ARFF file; text files are vectorized with their own vocabulary.
    #[staticmethod]
    #[pyo3(signature = (path, algorithm = "mnb", seed = 42, weighting = "count"))]
    fn train(py: Python<'_>, path: PathBuf, algorithm: &str, seed: u64, weighting: &str) -> PyResult<Classifier> {
        let data = load(&path)?;
        py.detach(|| Classifier::fit(&data, algorithm, seed, weighting))
    }

    /// Trains on parallel lists of review texts and labels.
    #[staticmethod]
    #[pyo3(signature = (texts, labels, algorithm = "mnb", seed = 42, weighting = "count"))]
    fn from_texts(
        py: Python<'_>,
        texts: Vec<String>,
        labels: Vec<String>,
        algorithm: &str,
        seed: u64,
        weighting: &str,
    ) -> PyResult<Classifier> {
        if texts.len() != labels.len() {
            return Err(value_error(format!("{} texts but {} labels", texts.len(), labels.len())));
        }
        let mut classes = labels.clone();
        classes.sort();
        classes.dedup();
        let docs: Vec<Document> = texts
            .into_iter()
            .zip(labels)
            .map(|(text, label)| Document { text, label })
            .collect();
        let data = Dataset::from_documents("reviews", classes, &docs).map_err(value_error)?;
        py.detach(|| Classifier::fit(&data, algorithm, seed, weighting))
    }

    /// Loads a model file written by `save` or the command line tool.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Classifier> {
        let text = fs::read_to_string(&path).map_err(|e| PyOSError::new_err(format!("{}: {e}", path.display())))?;
        let model = Model::from_text(&text).map_err(value_error)?;
        Ok(Classifier { space: None, model })
    }

    /// Writes the model (not the vocabulary) in the command line tool's format.
    fn save(&self, path: PathBuf) -> PyResult<()> {
        fs::write(&path, self.model.to_text()).map_err(|e| PyOSError::new_err(format!("{}: {e}", path.display())))
    }

    #[getter]
    fn algorithm(&self) -> &'static str {
        self.model.algorithm().name()
    }

    #[getter]
    fn classes(&self) -> Vec<String> {
        self.model.class_values().to_vec()
    }

    #[getter]
    fn vocabulary(&self) -> Option<Vec<String>> {
        self.space.as_ref().map(|s| s.terms().to_vec())
    }

    /// Predicts the label of one review (text models only).
    fn predict(&self, text: &str) -> PyResult<String> {
        let space = self
            .space
            .as_ref()
            .ok_or_else(|| value_error("this model has no vocabulary; use predict_vector"))?;
        let x = space.vectorize_text(text).to_dense(space.len());
        self.model.predict_label(&x).map(str::to_owned).map_err(value_error)
    }

    fn predict_vector(&self, x: Vec<f64>) -> PyResult<String> {
        self.model.predict_label(&x).map(str::to_owned).map_err(value_error)
    }

    /// Scores the model on an ARFF test file and returns the measures as a dict.
    #[pyo3(signature = (path, positive_class = None))]
    fn evaluate<'py>(&self, py: Python<'py>, path: PathBuf, positive_class: Option<String>) -> PyResult<Bound<'py, PyDict>> {
        let test = self.matrix(&load(&path)?)?;
        let pos = positive(positive_class, test.class_values())?;
        let name = self.model.algorithm().display_name();
        let report = py.detach(|| evaluate_named(name, &self.model, &test, &pos)).map_err(value_error)?;
        report_dict(py, &report)
    }
}

/// Names accepted by `algorithm=`.
#[pyfunction]
fn algorithms() -> Vec<&'static str> {
    Algorithm::ALL.iter().map(|a| a.name()).collect()
}

/// Trains each algorithm on `train` and scores it on `test`, best first.
#[pyfunction]
#[pyo3(signature = (train, test, algorithms = None, seed = 42, positive_class = None))]
fn compare<'py>(
    py: Python<'py>,
    train: PathBuf,
    test: PathBuf,
    algorithms: Option<Vec<String>>,
    seed: u64,
    positive_class: Option<String>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let names: Vec<String> = match algorithms {
        Some(a) => a,
        None => Algorithm::ALL.iter().map(|a| a.name().to_owned()).collect(),
    };
    let (train_ds, test_ds) = (load(&train)?, load(&test)?);
    let mut reports = py.detach(|| -> PyResult<Vec<EvalReport>> {
        let mut reports = Vec::new();
        for name in &names {
            let c = Classifier::fit(&train_ds, name, seed, "count")?;
            let m = c.matrix(&test_ds)?;
            let pos = positive(positive_class.clone(), m.class_values())?;
            reports.push(evaluate_named(c.model.algorithm().display_name(), &c.model, &m, &pos).map_err(value_error)?);
        }
        Ok(reports)
    })?;
    reports.sort_by(|a, b| a.rank_cmp(b));
    reports.iter().map(|r| report_dict(py, r)).collect()
}

#[pymodule]
fn sentikit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Classifier>()?;
    m.add_function(wrap_pyfunction!(algorithms, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
