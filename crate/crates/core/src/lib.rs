//! Hypergraph neural networks on CPU.
//!
//! The crate covers the whole pipeline: building hypergraphs from features or
//! graphs ([`construction`]), the normalized operator `Θ` and Laplacian
//! `Δ = I - Θ` ([`hypergraph`]), dense spectral checks ([`spectral`]),
//! hyperedge-convolution networks with manual gradients ([`nn`]) and text
//! formats for datasets, hypergraphs and checkpoints ([`data`]).

pub mod construction;
pub mod data;
pub mod error;
pub mod hypergraph;
pub mod nn;
pub mod sparse;
pub mod spectral;

pub use construction::{
    graph_neighborhood_hyperedges, knn_hyperedges, probability_adjacency, EdgeList, FeatureMatrix,
};
pub use data::{DatasetBundle, LabelVector, SplitSpec};
pub use error::{HgnnError, Result};
pub use hypergraph::{concat_modalities, DegreeVectors, Hypergraph, NormalizedOperator};
pub use nn::{HgnnModel, TrainConfig};
