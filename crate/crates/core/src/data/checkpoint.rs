//! Single-file JSON checkpoints. Floats are written as shortest round-trip
//! decimals and parsed back with correct rounding, so weights survive
//! bit-for-bit.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{HgnnError, Result};
use crate::nn::{Activation, HgnnModel, LayerParams, TrainConfig};

pub const CHECKPOINT_VERSION: u32 = 1;

/// What gets stored next to the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub config: TrainConfig,
    pub seed: u64,
    pub classes: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct LayerRecord {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    format_version: u32,
    config: TrainConfig,
    seed: u64,
    activation: String,
    initialization: String,
    classes: Vec<String>,
    layers: Vec<LayerRecord>,
}

pub fn checkpoint_to_string(model: &HgnnModel, meta: &CheckpointMeta) -> Result<String> {
    let file = CheckpointFile {
        format_version: CHECKPOINT_VERSION,
        config: meta.config.clone(),
        seed: meta.seed,
        activation: match model.activation() {
            Activation::Relu => "relu",
            Activation::Identity => "identity",
        }
        .to_string(),
        initialization: "glorot_uniform".to_string(),
        classes: meta.classes.clone(),
        layers: model
            .layers()
            .iter()
            .map(|l| LayerRecord {
                rows: l.c_in(),
                cols: l.c_out(),
                weights: l.weight.iter().copied().collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

pub fn parse_checkpoint(text: &str) -> Result<(HgnnModel, CheckpointMeta)> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let version = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| HgnnError::parse("checkpoint", 0, "missing format_version"))?;
    if version != u64::from(CHECKPOINT_VERSION) {
        return Err(HgnnError::VersionMismatch {
            found: u32::try_from(version).unwrap_or(u32::MAX),
            expected: CHECKPOINT_VERSION,
        });
    }
    let file: CheckpointFile = serde_json::from_value(value)?;
    let activation = match file.activation.as_str() {
        "relu" => Activation::Relu,
        "identity" => Activation::Identity,
        other => {
            return Err(HgnnError::parse(
                "checkpoint",
                0,
                format!("unknown activation {other:?}"),
            ))
        }
    };
    let mut layers = Vec::with_capacity(file.layers.len());
    for (k, rec) in file.layers.into_iter().enumerate() {
        if rec.rows.checked_mul(rec.cols) != Some(rec.weights.len()) {
            return Err(HgnnError::ShapeMismatch(format!(
                "layer {k}: {} values for a {}x{} matrix",
                rec.weights.len(),
                rec.rows,
                rec.cols
            )));
        }
        let w = Array2::from_shape_vec((rec.rows, rec.cols), rec.weights)
            .map_err(|e| HgnnError::ShapeMismatch(e.to_string()))?;
        layers.push(LayerParams::new(w)?);
    }
    let model = HgnnModel::from_layers(layers, activation)?;
    if !file.classes.is_empty() && file.classes.len() != model.n_classes() {
        return Err(HgnnError::ShapeMismatch(format!(
            "{} class names for {} outputs",
            file.classes.len(),
            model.n_classes()
        )));
    }
    let meta = CheckpointMeta {
        config: file.config,
        seed: file.seed,
        classes: file.classes,
    };
    Ok((model, meta))
}

pub fn save_checkpoint(model: &HgnnModel, meta: &CheckpointMeta, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, checkpoint_to_string(model, meta)?).map_err(|e| HgnnError::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(HgnnModel, CheckpointMeta)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| HgnnError::io(path, e))?;
    parse_checkpoint(&text)
}

/// Fails with `ShapeMismatch` unless the model fits the feature width and
/// class count.
pub fn check_compatible(model: &HgnnModel, feature_dim: usize, n_classes: usize) -> Result<()> {
    if model.input_dim() != feature_dim {
        return Err(HgnnError::ShapeMismatch(format!(
            "checkpoint expects {} features, dataset has {feature_dim}",
            model.input_dim()
        )));
    }
    if model.n_classes() != n_classes {
        return Err(HgnnError::ShapeMismatch(format!(
            "checkpoint predicts {} classes, dataset has {n_classes}",
            model.n_classes()
        )));
    }
    Ok(())
}
