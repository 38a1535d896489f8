//! JSON persistence for trained models. The field layout is documented in
//! `docs/model-format.md`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzify::Partitioning;
use crate::rules::{ForecastRule, RuleBase};
use crate::series::TimeSeries;
use crate::train::{TrainedModel, TrainingConfig};

pub const FORMAT_TAG: &str = "fts-pso-model/1";

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot access model file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed model document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported model format {found:?}, expected {FORMAT_TAG:?}")]
    Format { found: String },
    #[error("non-finite value in {field}")]
    NonFinite { field: String },
    #[error("model was trained on a different series (fingerprint {expected}, input has {found})")]
    FingerprintMismatch { expected: String, found: String },
    #[error("rule base does not belong to the stored partitioning")]
    PartitioningMismatch,
}

#[derive(Serialize, Deserialize)]
struct Document {
    format: String,
    seed: u64,
    series_fingerprint: String,
    partitioning_fingerprint: String,
    config: TrainingConfig,
    partitioning: Partitioning,
    rules: Vec<ForecastRule>,
}

fn check_finite(field: impl FnOnce() -> String, x: f64) -> Result<(), ModelError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonFinite { field: field() })
    }
}

/// JSON numbers cannot carry NaN or infinities, so they are refused before
/// writing rather than silently turned into `null`.
fn validate_finite(model: &TrainedModel) -> Result<(), ModelError> {
    let p = &model.partitioning;
    check_finite(|| "universe.lower".into(), p.universe.lower)?;
    check_finite(|| "universe.upper".into(), p.universe.upper)?;
    check_finite(|| "segment_length".into(), p.segment_length)?;
    for s in &p.sets {
        for (name, x) in [("a", s.a), ("b", s.b), ("c", s.c), ("d", s.d)] {
            check_finite(|| format!("sets[{}].{name}", s.index), x)?;
        }
    }
    for r in &model.rulebase.rules {
        for (i, w) in r.weights.iter().flatten().enumerate() {
            check_finite(|| format!("rule {} weight {}", r.label, i + 1), *w)?;
        }
        if let Some(fit) = &r.fit {
            check_finite(|| format!("rule {} se", r.label), fit.se)?;
        }
    }
    let c = &model.config.pso;
    for (name, x) in [
        ("inertia", c.inertia),
        ("c1", c.c1),
        ("c2", c.c2),
        ("v_min", c.v_min),
        ("v_max", c.v_max),
        ("pos_min", c.pos_min),
        ("pos_max", c.pos_max),
    ] {
        check_finite(|| format!("config.pso.{name}"), x)?;
    }
    let l = &model.config.initial_weight_ladder;
    for (name, x) in [("start", l.start), ("step", l.step), ("floor", l.floor)] {
        check_finite(|| format!("config.initial_weight_ladder.{name}"), x)?;
    }
    Ok(())
}

pub fn to_json(model: &TrainedModel) -> Result<String, ModelError> {
    validate_finite(model)?;
    let doc = Document {
        format: FORMAT_TAG.to_string(),
        seed: model.seed,
        series_fingerprint: model.series_fingerprint.clone(),
        partitioning_fingerprint: model.rulebase.partitioning_fingerprint.clone(),
        config: model.config.clone(),
        partitioning: model.partitioning.clone(),
        rules: model.rulebase.rules.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

pub fn from_json(text: &str) -> Result<TrainedModel, ModelError> {
    let doc: Document = serde_json::from_str(text)?;
    if doc.format != FORMAT_TAG {
        return Err(ModelError::Format { found: doc.format });
    }
    if doc.partitioning.fingerprint() != doc.partitioning_fingerprint {
        return Err(ModelError::PartitioningMismatch);
    }
    Ok(TrainedModel {
        partitioning: doc.partitioning,
        rulebase: RuleBase {
            rules: doc.rules,
            partitioning_fingerprint: doc.partitioning_fingerprint,
        },
        config: doc.config,
        series_fingerprint: doc.series_fingerprint,
        seed: doc.seed,
    })
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    let text = to_json(model)?;
    fs::write(path, text).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel, ModelError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_json(&text)
}

/// Fails unless `model` was trained on exactly `series`.
pub fn check_series(model: &TrainedModel, series: &TimeSeries) -> Result<(), ModelError> {
    let found = series.fingerprint();
    if found == model.series_fingerprint {
        Ok(())
    } else {
        Err(ModelError::FingerprintMismatch {
            expected: model.series_fingerprint.clone(),
            found,
        })
    }
}
