//! Hyperedge convolution layers, the two-layer classifier, its gradients,
//! Adam and the training loop.

pub mod adam;
pub mod layer;
pub mod loss;
pub mod model;
pub mod train;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use layer::{gcn_forward, gcn_normalize, hyperconv_forward, LayerParams};
pub use loss::{accuracy, argmax, softmax_cross_entropy};
pub use model::{Activation, ForwardCache, HgnnModel, Mode};
pub use train::{
    evaluate, evaluate_with_operator, train, train_with_operator, EpochRecord, TrainConfig,
    TrainHistory,
};
