use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::construction::FeatureMatrix;
use crate::data::{LabelVector, SplitSpec};
use crate::error::{HgnnError, Result};
use crate::hypergraph::{Hypergraph, NormalizedOperator};
use crate::nn::adam::{adam_step, AdamConfig, AdamState};
use crate::nn::loss::{accuracy, softmax_cross_entropy};
use crate::nn::model::{HgnnModel, Mode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub dropout_p: f64,
    pub hidden_dim: usize,
    pub epochs: usize,
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    /// Zero disables early stopping.
    pub early_stop_patience: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.001,
            dropout_p: 0.5,
            hidden_dim: 16,
            epochs: 200,
            seed: 0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            early_stop_patience: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HgnnError::InvalidConfig(m));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.dropout_p) {
            return bad(format!("dropout must lie in [0, 1), got {}", self.dropout_p));
        }
        if self.hidden_dim == 0 {
            return bad("hidden dimension must be positive".into());
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("Adam betas must lie in [0, 1)".into());
        }
        if !(self.adam_eps > 0.0) {
            return bad("Adam epsilon must be positive".into());
        }
        Ok(())
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
            eps: self.adam_eps,
        }
    }
}

/// One line of the training history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: Option<f64>,
    pub val_acc: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose weights were returned, when early stopping picked one.
    pub best_epoch: Option<usize>,
}

impl TrainHistory {
    /// JSON lines, one record per epoch.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for rec in &self.epochs {
            out.push_str(&serde_json::to_string(rec)?);
            out.push('\n');
        }
        Ok(out)
    }
}

/// Full-batch training of a two-layer model on a hypergraph.
pub fn train(
    g: &Hypergraph,
    x: &FeatureMatrix,
    labels: &LabelVector,
    split: &SplitSpec,
    cfg: &TrainConfig,
) -> Result<(HgnnModel, TrainHistory)> {
    if g.n_vertices() != x.n_vertices() {
        return Err(HgnnError::DimMismatch(format!(
            "hypergraph has {} vertices, features have {} rows",
            g.n_vertices(),
            x.n_vertices()
        )));
    }
    train_with_operator(&g.normalized_theta(), x, labels, split, cfg)
}

/// Same as [`train`] with a precomputed propagation operator.
pub fn train_with_operator(
    op: &NormalizedOperator,
    x: &FeatureMatrix,
    labels: &LabelVector,
    split: &SplitSpec,
    cfg: &TrainConfig,
) -> Result<(HgnnModel, TrainHistory)> {
    cfg.validate()?;
    let n = x.n_vertices();
    if op.n() != n || labels.len() != n {
        return Err(HgnnError::DimMismatch(format!(
            "operator on {} vertices, {} feature rows, {} labels",
            op.n(),
            n,
            labels.len()
        )));
    }
    split.validate(n)?;
    if split.train.is_empty() {
        return Err(HgnnError::EmptyMask);
    }
    let mut seen = vec![false; labels.n_classes()];
    for &i in &split.train {
        seen[labels.get(i)] = true;
    }
    if let Some(c) = seen.iter().position(|s| !s) {
        warn!("class {c} has no training vertex");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = HgnnModel::two_layer(x.dim(), cfg.hidden_dim, labels.n_classes(), &mut rng)?;
    let mut adam = AdamState::zeros_like(model.layers().iter().map(|l| &l.weight));
    let adam_cfg = cfg.adam();
    let mut history = TrainHistory::default();
    let mut best: Option<(f64, usize, HgnnModel)> = None;
    let xv = x.view();

    for epoch in 0..cfg.epochs {
        let (logits, cache) = model.forward(
            op,
            xv,
            Mode::Train {
                dropout: cfg.dropout_p,
            },
            &mut rng,
        )?;
        let (train_loss, probs) = softmax_cross_entropy(logits.view(), labels, &split.train)?;
        let grads = model.backward(op, xv, &cache, probs.view(), labels, &split.train)?;
        adam_step(model.weights_mut(), &grads, &mut adam, &adam_cfg)?;

        let (val_loss, val_acc) = if split.validation.is_empty() {
            (None, None)
        } else {
            let logits = model.predict(op, xv)?;
            let (loss, _) = softmax_cross_entropy(logits.view(), labels, &split.validation)?;
            let acc = accuracy(logits.view(), labels, &split.validation)?;
            (Some(loss), Some(acc))
        };
        history.epochs.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
            val_acc,
        });

        if cfg.early_stop_patience > 0 {
            if let Some(vl) = val_loss {
                match &best {
                    Some((b, _, _)) if vl >= *b => {}
                    _ => best = Some((vl, epoch, model.clone())),
                }
                if let Some((_, best_epoch, _)) = &best {
                    if epoch - best_epoch >= cfg.early_stop_patience {
                        break;
                    }
                }
            }
        }
    }

    if let Some((_, epoch, m)) = best {
        history.best_epoch = Some(epoch);
        model = m;
    }
    Ok((model, history))
}

/// Evaluation-mode accuracy on `index_set`.
pub fn evaluate(
    model: &HgnnModel,
    g: &Hypergraph,
    x: &FeatureMatrix,
    labels: &LabelVector,
    index_set: &[usize],
) -> Result<f64> {
    evaluate_with_operator(model, &g.normalized_theta(), x, labels, index_set)
}

pub fn evaluate_with_operator(
    model: &HgnnModel,
    op: &NormalizedOperator,
    x: &FeatureMatrix,
    labels: &LabelVector,
    index_set: &[usize],
) -> Result<f64> {
    if index_set.is_empty() {
        return Err(HgnnError::EmptyMask);
    }
    let logits = model.predict(op, x.view())?;
    accuracy(logits.view(), labels, index_set)
}
