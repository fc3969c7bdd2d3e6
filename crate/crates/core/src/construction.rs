//! Hypergraph and graph construction from raw data.
//!
//! * [`knn_hyperedges`]: one hyperedge per vertex, made of the vertex and its
//!   `k` nearest neighbours in feature space.
//! * [`graph_neighborhood_hyperedges`]: one hyperedge per vertex, made of the
//!   vertex and its neighbours in a given graph.
//! * [`probability_adjacency`]: the dense Gaussian-kernel graph used by the
//!   GCN baseline, `A_ij = exp(-2 D_ij² / Δ_avg)`.

use std::collections::BTreeSet;

use ndarray::{Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;

use crate::error::{HgnnError, Result};
use crate::hypergraph::Hypergraph;

/// Node features, one row per vertex. All entries finite, at least one column.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix(Array2<f64>);

impl FeatureMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.ncols() == 0 {
            return Err(HgnnError::ShapeMismatch(
                "feature matrix needs at least one column".into(),
            ));
        }
        if let Some(((row, col), _)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(HgnnError::NonFiniteFeature { row, col });
        }
        Ok(FeatureMatrix(values))
    }

    pub fn n_vertices(&self) -> usize {
        self.0.nrows()
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    /// Concatenate feature columns of several modalities.
    pub fn hstack(parts: &[&FeatureMatrix]) -> Result<FeatureMatrix> {
        let first = parts.first().ok_or(HgnnError::EmptyInputList)?;
        let n = first.n_vertices();
        if let Some(p) = parts.iter().find(|p| p.n_vertices() != n) {
            return Err(HgnnError::ShapeMismatch(format!(
                "cannot stack {} rows onto {} rows",
                p.n_vertices(),
                n
            )));
        }
        let views: Vec<_> = parts.iter().map(|p| p.view()).collect();
        let out = ndarray::concatenate(ndarray::Axis(1), &views)
            .map_err(|e| HgnnError::ShapeMismatch(e.to_string()))?;
        Ok(FeatureMatrix(out))
    }
}

/// Undirected simple edges `(u, v)` with `u != v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pairs: Vec<(usize, usize)>,
}

impl EdgeList {
    pub fn new(pairs: Vec<(usize, usize)>, n_vertices: usize) -> Result<Self> {
        for &(u, v) in &pairs {
            let bad = u.max(v);
            if bad >= n_vertices {
                return Err(HgnnError::IndexOutOfRange {
                    index: bad,
                    n_vertices,
                });
            }
            if u == v {
                return Err(HgnnError::InvalidConfig(format!("self-loop on vertex {u}")));
            }
        }
        Ok(EdgeList { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// One past the largest vertex index mentioned, or zero.
    pub fn min_vertices(&self) -> usize {
        self.pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0)
    }

    /// Dense symmetric 0/1 adjacency without self-loops.
    pub fn adjacency_dense(&self, n_vertices: usize) -> Array2<f64> {
        let mut a = Array2::zeros((n_vertices, n_vertices));
        for &(u, v) in &self.pairs {
            a[[u, v]] = 1.0;
            a[[v, u]] = 1.0;
        }
        a
    }
}

/// Distance used for nearest-neighbour hyperedges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Metric {
    #[default]
    Euclidean,
}

/// Which average scales the probability graph kernel.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DistanceScale {
    /// Mean of the unsquared pairwise distances.
    #[default]
    MeanDistance,
    /// Mean of the squared pairwise distances.
    MeanSquaredDistance,
}

fn squared_distance(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `k` nearest neighbour hyperedges under Euclidean distance.
pub fn knn_hyperedges(x: &FeatureMatrix, k: usize) -> Result<Hypergraph> {
    knn_hyperedges_with(x, k, Metric::Euclidean)
}

/// Hyperedge `i` holds vertex `i` and the `k` other vertices closest to it.
/// Equidistant candidates are taken in ascending index order.
pub fn knn_hyperedges_with(x: &FeatureMatrix, k: usize, metric: Metric) -> Result<Hypergraph> {
    let n = x.n_vertices();
    if k == 0 || k >= n {
        return Err(HgnnError::KTooLarge { k, n_vertices: n });
    }
    let Metric::Euclidean = metric;
    let xv = x.view();
    let hyperedges: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let row = xv.row(i);
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (squared_distance(row, xv.row(j)), j))
                .collect();
            cand.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut edge: Vec<usize> = cand[..k].iter().map(|&(_, j)| j).collect();
            edge.push(i);
            edge
        })
        .collect();
    Hypergraph::new(&hyperedges, n, None)
}

/// Hyperedge `i` holds vertex `i` and its graph neighbours.
pub fn graph_neighborhood_hyperedges(edges: &EdgeList, n_vertices: usize) -> Result<Hypergraph> {
    let mut members: Vec<BTreeSet<usize>> = (0..n_vertices).map(|i| BTreeSet::from([i])).collect();
    for &(u, v) in edges.pairs() {
        let bad = u.max(v);
        if bad >= n_vertices {
            return Err(HgnnError::IndexOutOfRange {
                index: bad,
                n_vertices,
            });
        }
        members[u].insert(v);
        members[v].insert(u);
    }
    let hyperedges: Vec<Vec<usize>> = members.into_iter().map(|s| s.into_iter().collect()).collect();
    Hypergraph::new(&hyperedges, n_vertices, None)
}

/// `A_ij = exp(-2 D_ij² / Δ_avg)` with `Δ_avg` the mean pairwise distance.
pub fn probability_adjacency(x: &FeatureMatrix) -> Result<Array2<f64>> {
    probability_adjacency_with(x, DistanceScale::MeanDistance)
}

pub fn probability_adjacency_with(x: &FeatureMatrix, scale: DistanceScale) -> Result<Array2<f64>> {
    let n = x.n_vertices();
    if n < 2 {
        return Err(HgnnError::DegenerateDistances);
    }
    let xv = x.view();
    let mut sq = Array2::<f64>::zeros((n, n));
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d2 = squared_distance(xv.row(i), xv.row(j));
            sq[[i, j]] = d2;
            sq[[j, i]] = d2;
            total += match scale {
                DistanceScale::MeanDistance => d2.sqrt(),
                DistanceScale::MeanSquaredDistance => d2,
            };
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let avg = total / pairs;
    if avg <= 0.0 {
        return Err(HgnnError::DegenerateDistances);
    }
    Ok(sq.mapv(|d2| (-2.0 * d2 / avg).exp()))
}

/// Elementwise mean of equally shaped matrices.
pub fn average_adjacency(mats: &[Array2<f64>]) -> Result<Array2<f64>> {
    let first = mats.first().ok_or(HgnnError::EmptyInputList)?;
    let mut sum = Array2::<f64>::zeros(first.raw_dim());
    for m in mats {
        if m.dim() != first.dim() {
            return Err(HgnnError::ShapeMismatch(format!(
                "{:?} vs {:?}",
                m.dim(),
                first.dim()
            )));
        }
        sum += m;
    }
    Ok(sum / mats.len() as f64)
}
