//! Immutable weighted hypergraphs and their degree / normalization algebra.
//!
//! A hypergraph is stored column-compressed: hyperedge `e` owns the ascending
//! vertex list `edge_vertices[edge_ptr[e]..edge_ptr[e + 1]]`, which is exactly
//! the set of rows where column `e` of the incidence matrix `H` is one. The
//! diagonal of the edge-weight matrix `W` is kept alongside.
//!
//! From these the normalized propagation operator
//! `Θ = Dv^{-1/2} H W De^{-1} Hᵀ Dv^{-1/2}` and the Laplacian `Δ = I - Θ`
//! are derived. Vertices with zero degree get a zero entry in `Dv^{-1/2}`, so
//! their rows and columns of `Θ` are empty.

use ndarray::Array2;

use crate::error::{HgnnError, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    n_vertices: usize,
    edge_ptr: Vec<usize>,
    edge_vertices: Vec<usize>,
    weights: Vec<f64>,
}

/// `d(v) = Σ_e w(e) h(v, e)` and `δ(e) = Σ_v h(v, e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVectors {
    pub vertex_degrees: Vec<f64>,
    pub edge_degrees: Vec<usize>,
}

/// Symmetric normalized propagation matrix `Θ` in row-compressed form.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedOperator {
    theta: CsrMatrix,
}

impl Hypergraph {
    /// Build from explicit vertex lists. Lists may be given in any order but
    /// must not repeat a vertex. Missing weights default to one.
    pub fn new(
        hyperedges: &[Vec<usize>],
        n_vertices: usize,
        weights: Option<&[f64]>,
    ) -> Result<Self> {
        if let Some(w) = weights {
            if w.len() != hyperedges.len() {
                return Err(HgnnError::WeightCountMismatch {
                    expected: hyperedges.len(),
                    got: w.len(),
                });
            }
        }
        let mut edge_ptr = Vec::with_capacity(hyperedges.len() + 1);
        let mut edge_vertices = Vec::with_capacity(hyperedges.iter().map(Vec::len).sum());
        edge_ptr.push(0);
        for (e, members) in hyperedges.iter().enumerate() {
            if members.is_empty() {
                return Err(HgnnError::EmptyHyperedge { edge: e });
            }
            let start = edge_vertices.len();
            for &v in members {
                if v >= n_vertices {
                    return Err(HgnnError::IndexOutOfRange {
                        index: v,
                        n_vertices,
                    });
                }
                edge_vertices.push(v);
            }
            let slot = &mut edge_vertices[start..];
            slot.sort_unstable();
            if let Some(w) = slot.windows(2).find(|w| w[0] == w[1]) {
                return Err(HgnnError::DuplicateVertexInEdge {
                    edge: e,
                    vertex: w[0],
                });
            }
            edge_ptr.push(edge_vertices.len());
        }
        let weights = match weights {
            Some(w) => {
                if let Some((edge, &weight)) = w
                    .iter()
                    .enumerate()
                    .find(|(_, &x)| !(x > 0.0 && x.is_finite()))
                {
                    return Err(HgnnError::NonPositiveWeight { edge, weight });
                }
                w.to_vec()
            }
            None => vec![1.0; hyperedges.len()],
        };
        Ok(Hypergraph {
            n_vertices,
            edge_ptr,
            edge_vertices,
            weights,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.weights.len()
    }

    /// Number of ones in the incidence matrix.
    pub fn nnz(&self) -> usize {
        self.edge_vertices.len()
    }

    /// Ascending vertex list of hyperedge `e`.
    pub fn hyperedge(&self, e: usize) -> &[usize] {
        &self.edge_vertices[self.edge_ptr[e]..self.edge_ptr[e + 1]]
    }

    pub fn hyperedges(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        (0..self.n_edges()).map(move |e| self.hyperedge(e))
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Same structure with `W = I`.
    pub fn with_unit_weights(&self) -> Hypergraph {
        Hypergraph {
            weights: vec![1.0; self.n_edges()],
            ..self.clone()
        }
    }

    /// Dense `n_vertices × n_edges` incidence matrix.
    pub fn incidence_dense(&self) -> Array2<f64> {
        let mut h = Array2::zeros((self.n_vertices, self.n_edges()));
        for (e, members) in self.hyperedges().enumerate() {
            for &v in members {
                h[[v, e]] = 1.0;
            }
        }
        h
    }

    /// For each vertex, the ascending list of hyperedges containing it.
    pub fn vertex_incidence(&self) -> (Vec<usize>, Vec<usize>) {
        let mut counts = vec![0usize; self.n_vertices + 1];
        for &v in &self.edge_vertices {
            counts[v + 1] += 1;
        }
        for i in 0..self.n_vertices {
            counts[i + 1] += counts[i];
        }
        let ptr = counts.clone();
        let mut fill = counts;
        let mut edges = vec![0usize; self.edge_vertices.len()];
        for e in 0..self.n_edges() {
            for &v in self.hyperedge(e) {
                edges[fill[v]] = e;
                fill[v] += 1;
            }
        }
        (ptr, edges)
    }

    pub fn degrees(&self) -> DegreeVectors {
        let mut vertex_degrees = vec![0.0; self.n_vertices];
        let mut edge_degrees = Vec::with_capacity(self.n_edges());
        for (e, members) in self.hyperedges().enumerate() {
            edge_degrees.push(members.len());
            for &v in members {
                vertex_degrees[v] += self.weights[e];
            }
        }
        DegreeVectors {
            vertex_degrees,
            edge_degrees,
        }
    }

    /// `Dv^{-1/2}` diagonal with the zero-degree convention.
    pub fn inv_sqrt_vertex_degrees(&self) -> Vec<f64> {
        inv_sqrt(&self.degrees().vertex_degrees)
    }

    /// Materialize `Θ = Dv^{-1/2} H W De^{-1} Hᵀ Dv^{-1/2}`.
    pub fn normalized_theta(&self) -> NormalizedOperator {
        self.normalized_operator_with(&self.weights, &self.inv_sqrt_vertex_degrees())
    }

    /// `Dv^{-1/2} H diag(edge_scale) De^{-1} Hᵀ Dv^{-1/2}` for an arbitrary
    /// per-edge scale and a caller-supplied `Dv^{-1/2}`.
    pub(crate) fn normalized_operator_with(
        &self,
        edge_scale: &[f64],
        inv_sqrt_dv: &[f64],
    ) -> NormalizedOperator {
        let n = self.n_vertices;
        let (vptr, vedges) = self.vertex_incidence();
        let coef: Vec<f64> = (0..self.n_edges())
            .map(|e| edge_scale[e] / self.hyperedge(e).len() as f64)
            .collect();

        let mut acc = vec![0.0f64; n];
        let mut touched = vec![false; n];
        let mut cols: Vec<usize> = Vec::new();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for i in 0..n {
            let si = inv_sqrt_dv[i];
            if si != 0.0 {
                for &e in &vedges[vptr[i]..vptr[i + 1]] {
                    let c = coef[e];
                    for &j in self.hyperedge(e) {
                        if !touched[j] {
                            touched[j] = true;
                            cols.push(j);
                        }
                        acc[j] += c;
                    }
                }
                cols.sort_unstable();
                for &j in &cols {
                    let v = acc[j] * (si * inv_sqrt_dv[j]);
                    if v != 0.0 {
                        indices.push(j);
                        values.push(v);
                    }
                    acc[j] = 0.0;
                    touched[j] = false;
                }
                cols.clear();
            }
            indptr.push(indices.len());
        }
        NormalizedOperator {
            theta: CsrMatrix::from_parts_unchecked(n, n, indptr, indices, values),
        }
    }
}

pub(crate) fn inv_sqrt(d: &[f64]) -> Vec<f64> {
    d.iter()
        .map(|&x| if x > 0.0 { 1.0 / x.sqrt() } else { 0.0 })
        .collect()
}

impl NormalizedOperator {
    pub fn theta(&self) -> &CsrMatrix {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.theta.n_rows()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        self.theta.to_dense()
    }

    /// `Δ = I - Θ` in row-compressed form.
    pub fn laplacian(&self) -> CsrMatrix {
        let n = self.n();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(self.theta.nnz() + n);
        let mut values = Vec::with_capacity(self.theta.nnz() + n);
        indptr.push(0);
        for i in 0..n {
            let mut diag_done = false;
            for (j, v) in self.theta.row(i) {
                if !diag_done && j >= i {
                    if j == i {
                        indices.push(i);
                        values.push(1.0 - v);
                        diag_done = true;
                        continue;
                    }
                    indices.push(i);
                    values.push(1.0);
                    diag_done = true;
                }
                indices.push(j);
                values.push(-v);
            }
            if !diag_done {
                indices.push(i);
                values.push(1.0);
            }
            indptr.push(indices.len());
        }
        CsrMatrix::from_parts_unchecked(n, n, indptr, indices, values)
    }

    /// `Δ · x` without materializing `Δ`.
    pub fn apply_laplacian(&self, x: &[f64]) -> Result<Vec<f64>> {
        let tx = self.theta.mul_vec(x)?;
        Ok(x.iter().zip(tx).map(|(a, b)| a - b).collect())
    }
}

/// Column-concatenate hyperedge groups that share a vertex set.
pub fn concat_modalities(graphs: &[Hypergraph]) -> Result<Hypergraph> {
    let first = graphs.first().ok_or(HgnnError::EmptyInputList)?;
    let n_vertices = first.n_vertices;
    let mut edge_ptr = vec![0];
    let mut edge_vertices = Vec::new();
    let mut weights = Vec::new();
    for g in graphs {
        if g.n_vertices != n_vertices {
            return Err(HgnnError::VertexCountMismatch {
                expected: n_vertices,
                got: g.n_vertices,
            });
        }
        let offset = edge_vertices.len();
        edge_vertices.extend_from_slice(&g.edge_vertices);
        edge_ptr.extend(g.edge_ptr[1..].iter().map(|p| p + offset));
        weights.extend_from_slice(&g.weights);
    }
    Ok(Hypergraph {
        n_vertices,
        edge_ptr,
        edge_vertices,
        weights,
    })
}
