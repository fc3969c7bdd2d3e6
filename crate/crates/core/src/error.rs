use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = HgnnError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HgnnError {
    #[error("hyperedge {edge} has no vertices")]
    EmptyHyperedge { edge: usize },

    #[error("vertex index {index} out of range for {n_vertices} vertices")]
    IndexOutOfRange { index: usize, n_vertices: usize },

    #[error("hyperedge {edge} has non-positive weight {weight}")]
    NonPositiveWeight { edge: usize, weight: f64 },

    #[error("vertex {vertex} appears more than once in hyperedge {edge}")]
    DuplicateVertexInEdge { edge: usize, vertex: usize },

    #[error("expected {expected} edge weights, got {got}")]
    WeightCountMismatch { expected: usize, got: usize },

    #[error("hypergraphs disagree on vertex count: {expected} vs {got}")]
    VertexCountMismatch { expected: usize, got: usize },

    #[error("empty input list")]
    EmptyInputList,

    #[error("k = {k} is invalid for {n_vertices} vertices (need 1 <= k <= n - 1)")]
    KTooLarge { k: usize, n_vertices: usize },

    #[error("feature entry ({row}, {col}) is not finite")]
    NonFiniteFeature { row: usize, col: usize },

    #[error("all pairwise distances are zero")]
    DegenerateDistances,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("matrix is not symmetric (|a[{row}][{col}] - a[{col}][{row}]| = {diff:e})")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("dense path limited to n <= {limit}, got n = {n}")]
    TooLarge { n: usize, limit: usize },

    #[error("mask / index set is empty")]
    EmptyMask,

    #[error("forward cache is stale (cache generation {cache}, model generation {model})")]
    StaleCache { cache: u64, model: u64 },

    #[error("split sets overlap at vertex {vertex}")]
    DisjointnessViolation { vertex: usize },

    #[error("label {label} out of range for {n_classes} classes")]
    InvalidLabel { label: usize, n_classes: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("missing file {0}")]
    MissingFile(PathBuf),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("inconsistent node count: {0}")]
    InconsistentNodeCount(String),

    #[error("split index {index} out of range for {n_vertices} vertices")]
    SplitOutOfRange { index: usize, n_vertices: usize },

    #[error("split overlap at vertex {vertex}")]
    SplitOverlap { vertex: usize },

    #[error("unsupported checkpoint version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl HgnnError {
    pub(crate) fn parse(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        HgnnError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HgnnError::Io {
            path: path.into(),
            source,
        }
    }
}
