//! Stacked hyperedge convolutions with hand-written reverse mode.
//!
//! Layer `l` computes `Z_l = Θ H_l W_l`. Every layer but the last is followed
//! by the activation and, in training mode, inverted dropout:
//! `H_{l+1} = act(Z_l) ⊙ M_l` with `M_l` entries in `{0, 1/(1-p)}`. The last
//! `Z` is the logit matrix.

use ndarray::{Array2, ArrayView2, Zip};
use rand::Rng;

use crate::data::LabelVector;
use crate::error::{HgnnError, Result};
use crate::hypergraph::NormalizedOperator;
use crate::nn::layer::{hyperconv_forward, LayerParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Identity => z,
        }
    }

    // ReLU'(0) = 0.
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Eval,
    /// Training mode with dropout probability `p` on hidden activations.
    Train { dropout: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HgnnModel {
    layers: Vec<LayerParams>,
    activation: Activation,
    generation: u64,
}

/// Intermediate values kept by [`HgnnModel::forward`] for [`HgnnModel::backward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    generation: u64,
    n_rows: usize,
    /// Pre-activations of the hidden layers.
    preacts: Vec<Array2<f64>>,
    /// Dropout multipliers of the hidden layers, when dropout was active.
    masks: Vec<Option<Array2<f64>>>,
    /// Inputs of layers `1..`, i.e. post-dropout hidden activations.
    hidden: Vec<Array2<f64>>,
}

impl ForwardCache {
    /// Post-dropout activations of hidden layer `l`.
    pub fn hidden(&self, l: usize) -> &Array2<f64> {
        &self.hidden[l]
    }
}

impl HgnnModel {
    pub fn from_layers(layers: Vec<LayerParams>, activation: Activation) -> Result<Self> {
        if layers.is_empty() {
            return Err(HgnnError::InvalidConfig("model needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].c_out() != pair[1].c_in() {
                return Err(HgnnError::ShapeMismatch(format!(
                    "layer widths {} -> {} do not chain",
                    pair[0].c_out(),
                    pair[1].c_in()
                )));
            }
        }
        Ok(HgnnModel {
            layers,
            activation,
            generation: 0,
        })
    }

    /// Glorot-initialized stack with the given widths, e.g. `[c_in, 16, classes]`.
    pub fn glorot<R: Rng + ?Sized>(widths: &[usize], rng: &mut R) -> Result<Self> {
        if widths.len() < 2 {
            return Err(HgnnError::InvalidConfig(
                "need an input and an output width".into(),
            ));
        }
        let layers = widths
            .windows(2)
            .map(|w| LayerParams::glorot(w[0], w[1], rng))
            .collect();
        Self::from_layers(layers, Activation::Relu)
    }

    /// Two hyperedge convolutions: `c_in → hidden → n_classes`.
    pub fn two_layer<R: Rng + ?Sized>(
        c_in: usize,
        hidden: usize,
        n_classes: usize,
        rng: &mut R,
    ) -> Result<Self> {
        Self::glorot(&[c_in, hidden, n_classes], rng)
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].c_in()
    }

    pub fn n_classes(&self) -> usize {
        self.layers.last().unwrap().c_out()
    }

    /// Width of the first hidden layer, if any.
    pub fn hidden_dim(&self) -> Option<usize> {
        (self.layers.len() > 1).then(|| self.layers[0].c_out())
    }

    /// Bumped on every parameter change; caches from older generations are
    /// rejected by `backward`.
    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Mutable access to the weight matrices. Invalidates outstanding caches.
    pub fn weights_mut(&mut self) -> impl Iterator<Item = &mut Array2<f64>> {
        self.generation += 1;
        self.layers.iter_mut().map(|l| &mut l.weight)
    }

    pub fn forward<R: Rng + ?Sized>(
        &self,
        op: &NormalizedOperator,
        x: ArrayView2<'_, f64>,
        mode: Mode,
        rng: &mut R,
    ) -> Result<(Array2<f64>, ForwardCache)> {
        if x.ncols() != self.input_dim() {
            return Err(HgnnError::DimMismatch(format!(
                "{} input features for a model expecting {}",
                x.ncols(),
                self.input_dim()
            )));
        }
        let dropout = match mode {
            Mode::Train { dropout } if dropout > 0.0 => {
                if dropout >= 1.0 {
                    return Err(HgnnError::InvalidConfig(format!(
                        "dropout must be < 1, got {dropout}"
                    )));
                }
                Some(dropout)
            }
            _ => None,
        };

        let last = self.layers.len() - 1;
        let mut cache = ForwardCache {
            generation: self.generation,
            n_rows: x.nrows(),
            preacts: Vec::with_capacity(last),
            masks: Vec::with_capacity(last),
            hidden: Vec::with_capacity(last),
        };
        let mut z = hyperconv_forward(op, x, &self.layers[0])?;
        for layer in &self.layers[1..] {
            let mut h = z.mapv(|v| self.activation.apply(v));
            let mask = dropout.map(|p| {
                let keep = 1.0 / (1.0 - p);
                let m = Array2::from_shape_simple_fn(h.raw_dim(), || {
                    if rng.gen::<f64>() < p {
                        0.0
                    } else {
                        keep
                    }
                });
                h *= &m;
                m
            });
            cache.preacts.push(z);
            cache.masks.push(mask);
            let next = hyperconv_forward(op, h.view(), layer)?;
            cache.hidden.push(h);
            z = next;
        }
        Ok((z, cache))
    }

    /// Evaluation-mode logits.
    pub fn predict(&self, op: &NormalizedOperator, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut unused = rand::rngs::mock::StepRng::new(0, 0);
        Ok(self.forward(op, x, Mode::Eval, &mut unused)?.0)
    }

    /// Gradients of the masked mean cross-entropy with respect to every
    /// weight matrix, given the softmax probabilities of the cached forward.
    pub fn backward(
        &self,
        op: &NormalizedOperator,
        x: ArrayView2<'_, f64>,
        cache: &ForwardCache,
        probs: ArrayView2<'_, f64>,
        labels: &LabelVector,
        mask: &[usize],
    ) -> Result<Vec<Array2<f64>>> {
        if cache.generation != self.generation {
            return Err(HgnnError::StaleCache {
                cache: cache.generation,
                model: self.generation,
            });
        }
        if mask.is_empty() {
            return Err(HgnnError::EmptyMask);
        }
        if x.nrows() != cache.n_rows || probs.nrows() != cache.n_rows {
            return Err(HgnnError::DimMismatch(
                "inputs do not match the cached forward pass".into(),
            ));
        }
        if probs.ncols() != self.n_classes() {
            return Err(HgnnError::DimMismatch(format!(
                "{} probability columns for {} classes",
                probs.ncols(),
                self.n_classes()
            )));
        }

        let scale = 1.0 / mask.len() as f64;
        let mut dz = Array2::<f64>::zeros(probs.raw_dim());
        for &i in mask {
            let y = labels.get(i);
            let mut row = dz.row_mut(i);
            row.assign(&probs.row(i));
            row[y] -= 1.0;
            row.mapv_inplace(|v| v * scale);
        }

        let mut grads = vec![Array2::zeros((0, 0)); self.layers.len()];
        for l in (0..self.layers.len()).rev() {
            // Θ is symmetric, so Θᵀ dZ = Θ dZ.
            let back = op.theta().mul_dense(dz.view())?;
            let input = if l == 0 { x } else { cache.hidden[l - 1].view() };
            grads[l] = input.t().dot(&back);
            if l > 0 {
                let mut dh = back.dot(&self.layers[l].weight.t());
                if let Some(m) = &cache.masks[l - 1] {
                    dh *= m;
                }
                let act = self.activation;
                Zip::from(&mut dh)
                    .and(&cache.preacts[l - 1])
                    .for_each(|d, &z| *d *= act.derivative(z));
                dz = dh;
            }
        }
        Ok(grads)
    }
}
