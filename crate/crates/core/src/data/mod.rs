//! Dataset directories, hypergraph files and checkpoints.
//!
//! A dataset directory holds:
//!
//! | file              | line format                                  |
//! |-------------------|----------------------------------------------|
//! | `features.tsv`    | `node_id<TAB>v1<TAB>v2...`, ids `0..n` in order |
//! | `labels.tsv`      | `node_id<TAB>class_name`                      |
//! | `edges.tsv`       | `u<TAB>v`, undirected                         |
//! | `hyperedges.tsv`  | see [`hyperedges`]                            |
//! | `split.json`      | `{"train":[..],"validation":[..],"test":[..]}` |
//!
//! At least one of `edges.tsv` / `hyperedges.tsv` must exist.

pub mod checkpoint;
pub mod hyperedges;
mod labels;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::construction::{graph_neighborhood_hyperedges, EdgeList, FeatureMatrix};
use crate::error::{HgnnError, Result};
use crate::hypergraph::Hypergraph;

pub use checkpoint::{
    check_compatible, checkpoint_to_string, load_checkpoint, parse_checkpoint, save_checkpoint,
    CheckpointMeta, CHECKPOINT_VERSION,
};
pub use hyperedges::{
    hypergraph_to_string, load_hypergraph, load_hypergraph_with_n, parse_hypergraph,
    save_hypergraph,
};
pub use labels::{LabelVector, SplitSpec};

use hyperedges::lines;

#[derive(Debug, Clone)]
pub struct DatasetBundle {
    pub features: FeatureMatrix,
    pub labels: LabelVector,
    /// Class names, index = class id. Sorted lexicographically.
    pub class_names: Vec<String>,
    pub edges: Option<EdgeList>,
    pub hypergraph: Option<Hypergraph>,
    pub split: SplitSpec,
}

impl DatasetBundle {
    pub fn n_vertices(&self) -> usize {
        self.features.n_vertices()
    }

    /// The stored hypergraph, or neighbourhood hyperedges of the stored graph.
    pub fn structure(&self) -> Result<Hypergraph> {
        match (&self.hypergraph, &self.edges) {
            (Some(g), _) => Ok(g.clone()),
            (None, Some(e)) => graph_neighborhood_hyperedges(e, self.n_vertices()),
            (None, None) => Err(HgnnError::InvalidConfig(
                "dataset has neither edges nor hyperedges".into(),
            )),
        }
    }
}

fn read_required(dir: &Path, name: &str) -> Result<Vec<u8>> {
    let path = dir.join(name);
    if !path.is_file() {
        return Err(HgnnError::MissingFile(path));
    }
    fs::read(&path).map_err(|e| HgnnError::io(&path, e))
}

pub fn parse_features(bytes: &[u8], source: &str) -> Result<FeatureMatrix> {
    let mut data = Vec::new();
    let mut dim: Option<usize> = None;
    let mut n = 0usize;
    for item in lines(bytes, source) {
        let (line_no, line) = item?;
        let err = |m: String| HgnnError::parse(source, line_no, m);
        let mut fields = line.split('\t');
        let id: usize = fields
            .next()
            .and_then(|t| t.trim().parse().ok())
            .ok_or_else(|| err("bad node id".into()))?;
        if id != n {
            return Err(err(format!("node id {id} out of order (expected {n})")));
        }
        let before = data.len();
        for tok in fields {
            let v: f64 = tok
                .trim()
                .parse()
                .map_err(|_| err(format!("non-numeric feature {tok:?}")))?;
            if !v.is_finite() {
                return Err(err(format!("non-finite feature {tok:?}")));
            }
            data.push(v);
        }
        let width = data.len() - before;
        match dim {
            None if width == 0 => return Err(err("row has no feature values".into())),
            None => dim = Some(width),
            Some(d) if d != width => {
                return Err(err(format!("row has {width} values, expected {d}")))
            }
            _ => {}
        }
        n += 1;
    }
    let dim = dim.ok_or_else(|| HgnnError::parse(source, 0, "no feature rows"))?;
    let values = Array2::from_shape_vec((n, dim), data)
        .map_err(|e| HgnnError::ShapeMismatch(e.to_string()))?;
    FeatureMatrix::new(values)
}

/// Returns per-node class names, in node order.
pub fn parse_labels(bytes: &[u8], source: &str, n_vertices: usize) -> Result<Vec<String>> {
    let mut names: Vec<Option<String>> = vec![None; n_vertices];
    for item in lines(bytes, source) {
        let (line_no, line) = item?;
        let err = |m: String| HgnnError::parse(source, line_no, m);
        let (id, name) = line
            .split_once('\t')
            .ok_or_else(|| err("expected node_id<TAB>class_name".into()))?;
        let id: usize = id.trim().parse().map_err(|_| err(format!("bad node id {id:?}")))?;
        let name = name.trim();
        if name.is_empty() || name.contains('\t') {
            return Err(err("bad class name".into()));
        }
        if id >= n_vertices {
            return Err(HgnnError::InconsistentNodeCount(format!(
                "{source}:{line_no}: node {id} but features have {n_vertices} rows"
            )));
        }
        if names[id].replace(name.to_string()).is_some() {
            return Err(err(format!("node {id} labelled twice")));
        }
    }
    names
        .into_iter()
        .enumerate()
        .map(|(i, n)| {
            n.ok_or_else(|| HgnnError::InconsistentNodeCount(format!("{source}: node {i} has no label")))
        })
        .collect()
}

pub fn parse_edges(bytes: &[u8], source: &str, n_vertices: usize) -> Result<EdgeList> {
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::new();
    for item in lines(bytes, source) {
        let (line_no, line) = item?;
        let err = |m: String| HgnnError::parse(source, line_no, m);
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(err(format!("expected u<TAB>v, found {} fields", fields.len())));
        }
        let u: usize = fields[0].trim().parse().map_err(|_| err("bad vertex id".into()))?;
        let v: usize = fields[1].trim().parse().map_err(|_| err("bad vertex id".into()))?;
        if u.max(v) >= n_vertices {
            return Err(HgnnError::InconsistentNodeCount(format!(
                "{source}:{line_no}: vertex {} but features have {n_vertices} rows",
                u.max(v)
            )));
        }
        if u == v {
            return Err(err(format!("self-loop on {u}")));
        }
        if seen.insert((u.min(v), u.max(v))) {
            pairs.push((u, v));
        }
    }
    EdgeList::new(pairs, n_vertices)
}

pub fn parse_split(text: &str, source: &str, n_vertices: usize) -> Result<SplitSpec> {
    let split: SplitSpec = serde_json::from_str(text).map_err(|e| {
        HgnnError::parse(source, e.line(), e.to_string())
    })?;
    let mut seen = vec![false; n_vertices];
    for set in [&split.train, &split.validation, &split.test] {
        for &v in set {
            if v >= n_vertices {
                return Err(HgnnError::SplitOutOfRange {
                    index: v,
                    n_vertices,
                });
            }
            if seen[v] {
                return Err(HgnnError::SplitOverlap { vertex: v });
            }
            seen[v] = true;
        }
    }
    SplitSpec::new(split.train, split.validation, split.test, n_vertices)
}

pub fn load_dataset(dir: impl AsRef<Path>) -> Result<DatasetBundle> {
    let dir = dir.as_ref();
    let src = |name: &str| dir.join(name).display().to_string();

    let features = parse_features(&read_required(dir, "features.tsv")?, &src("features.tsv"))?;
    let n = features.n_vertices();

    let names = parse_labels(&read_required(dir, "labels.tsv")?, &src("labels.tsv"), n)?;
    let class_names: Vec<String> = names.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let index: BTreeMap<&str, usize> = class_names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let labels = LabelVector::new(
        names.iter().map(|s| index[s.as_str()]).collect(),
        class_names.len(),
    )?;

    let split_bytes = read_required(dir, "split.json")?;
    let split_text = std::str::from_utf8(&split_bytes)
        .map_err(|_| HgnnError::parse(src("split.json"), 0, "invalid UTF-8"))?;
    let split = parse_split(split_text, &src("split.json"), n)?;

    let edges_path = dir.join("edges.tsv");
    let hyper_path = dir.join("hyperedges.tsv");
    if !edges_path.is_file() && !hyper_path.is_file() {
        return Err(HgnnError::MissingFile(dir.join("edges.tsv|hyperedges.tsv")));
    }
    let edges = if edges_path.is_file() {
        let bytes = fs::read(&edges_path).map_err(|e| HgnnError::io(&edges_path, e))?;
        Some(parse_edges(&bytes, &src("edges.tsv"), n)?)
    } else {
        None
    };
    let hypergraph = if hyper_path.is_file() {
        Some(load_hypergraph_with_n(&hyper_path, n)?)
    } else {
        None
    };

    Ok(DatasetBundle {
        features,
        labels,
        class_names,
        edges,
        hypergraph,
        split,
    })
}

/// Write a bundle in the directory layout [`load_dataset`] reads.
pub fn save_dataset(bundle: &DatasetBundle, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| HgnnError::io(dir, e))?;
    let write = |name: &str, text: String| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| HgnnError::io(&path, e))
    };

    let mut feats = String::new();
    for (i, row) in bundle.features.values().rows().into_iter().enumerate() {
        let _ = write!(feats, "{i}");
        for v in row {
            let _ = write!(feats, "\t{v}");
        }
        feats.push('\n');
    }
    write("features.tsv", feats)?;

    let mut labels = String::new();
    for (i, &c) in bundle.labels.as_slice().iter().enumerate() {
        let _ = writeln!(labels, "{i}\t{}", bundle.class_names[c]);
    }
    write("labels.tsv", labels)?;

    if let Some(edges) = &bundle.edges {
        let mut text = String::new();
        for &(u, v) in edges.pairs() {
            let _ = writeln!(text, "{u}\t{v}");
        }
        write("edges.tsv", text)?;
    }
    if let Some(g) = &bundle.hypergraph {
        write("hyperedges.tsv", hypergraph_to_string(g))?;
    }
    let mut split = serde_json::to_string(&bundle.split)?;
    split.push('\n');
    write("split.json", split)
}
