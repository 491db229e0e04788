//! File output: atomic writes, run manifests and JSON reports.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sentikit_core::classifiers::{Model, TrainConfig};
use sentikit_core::eval::EvalReport;
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

pub const MANIFEST_SCHEMA: &str = "sentikit-manifest";
pub const REPORT_SCHEMA: &str = "sentikit-report";
pub const SCHEMA_VERSION: u32 = 1;

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// `<file>.manifest.json` next to `output`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let name = output.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    output.with_file_name(format!("{name}.manifest.json"))
}

pub fn manifest(command: &str, config: Value) -> Value {
    json!({
        "schema": MANIFEST_SCHEMA,
        "version": SCHEMA_VERSION,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
    })
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::internal(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn path_json(p: &Path) -> Value {
    Value::String(p.display().to_string())
}

pub fn train_config_json(cfg: &TrainConfig) -> Value {
    json!({
        "seed": cfg.seed,
        "mnb": { "alpha": cfg.mnb.alpha },
        "knn": { "k": cfg.knn.k, "distance": cfg.knn.distance.to_string() },
        "dtree": { "max_depth": cfg.dtree.max_depth, "min_leaf": cfg.dtree.min_leaf },
        "bagging": {
            "trees": cfg.bagging.trees,
            "max_depth": cfg.bagging.tree.max_depth,
            "min_leaf": cfg.bagging.tree.min_leaf,
        },
        "rforest": {
            "trees": cfg.rforest.trees,
            "features_per_split": cfg.rforest.features_per_split,
            "max_depth": cfg.rforest.tree.max_depth,
            "min_leaf": cfg.rforest.tree.min_leaf,
        },
        "adaboost": { "rounds": cfg.adaboost.rounds, "weak_depth": cfg.adaboost.weak.max_depth },
        "svm": { "lambda": cfg.svm.lambda, "epochs": cfg.svm.epochs },
        "mlp": {
            "hidden": cfg.mlp.hidden,
            "activation": cfg.mlp.activation.name(),
            "learning_rate": cfg.mlp.learning_rate,
            "epochs": cfg.mlp.epochs,
            "batch_size": cfg.mlp.batch_size,
        },
    })
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub schema: &'static str,
    pub version: u32,
    pub positive_class: &'a str,
    pub test_instances: usize,
    pub reports: &'a [EvalReport],
}

impl<'a> Report<'a> {
    pub fn new(positive_class: &'a str, test_instances: usize, reports: &'a [EvalReport]) -> Self {
        Report {
            schema: REPORT_SCHEMA,
            version: SCHEMA_VERSION,
            positive_class,
            test_instances,
            reports,
        }
    }
}

pub fn save_model(path: &Path, model: &Model) -> Result<(), CliError> {
    write_atomic(path, model.to_text().as_bytes())
}
