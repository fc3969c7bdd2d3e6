use ndarray::{Array2, ArrayView2};
use rand::Rng;

use crate::error::{HgnnError, Result};
use crate::hypergraph::{inv_sqrt, NormalizedOperator};
use crate::sparse::CsrMatrix;

/// Learnable filter of one hyperedge convolution, `C_in × C_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub weight: Array2<f64>,
}

impl LayerParams {
    pub fn new(weight: Array2<f64>) -> Result<Self> {
        if weight.iter().any(|v| !v.is_finite()) {
            return Err(HgnnError::InvalidConfig("layer weight is not finite".into()));
        }
        Ok(LayerParams { weight })
    }

    /// Uniform Glorot initialization, bound `sqrt(6 / (fan_in + fan_out))`.
    pub fn glorot<R: Rng + ?Sized>(c_in: usize, c_out: usize, rng: &mut R) -> Self {
        let bound = (6.0 / (c_in + c_out) as f64).sqrt();
        let weight = Array2::from_shape_simple_fn((c_in, c_out), || rng.gen_range(-bound..bound));
        LayerParams { weight }
    }

    pub fn c_in(&self) -> usize {
        self.weight.nrows()
    }

    pub fn c_out(&self) -> usize {
        self.weight.ncols()
    }
}

/// `P · X · W` for a sparse propagation matrix `P`, choosing the cheaper
/// association: project first when the layer does not widen the features.
pub(crate) fn propagate_project(
    prop: &CsrMatrix,
    x: ArrayView2<'_, f64>,
    weight: ArrayView2<'_, f64>,
) -> Result<Array2<f64>> {
    if x.nrows() != prop.n_cols() {
        return Err(HgnnError::DimMismatch(format!(
            "{} feature rows for an operator on {} vertices",
            x.nrows(),
            prop.n_cols()
        )));
    }
    if x.ncols() != weight.nrows() {
        return Err(HgnnError::DimMismatch(format!(
            "{} feature columns for a {}x{} filter",
            x.ncols(),
            weight.nrows(),
            weight.ncols()
        )));
    }
    if weight.ncols() <= weight.nrows() {
        prop.mul_dense(x.dot(&weight).view())
    } else {
        Ok(prop.mul_dense(x)?.dot(&weight))
    }
}

/// Hyperedge convolution `Y = Θ X W`.
pub fn hyperconv_forward(
    op: &NormalizedOperator,
    x: ArrayView2<'_, f64>,
    layer: &LayerParams,
) -> Result<Array2<f64>> {
    propagate_project(op.theta(), x, layer.weight.view())
}

/// Symmetric normalization `D^{-1/2} A D^{-1/2}` of a dense adjacency.
/// Rows with zero degree stay zero.
pub fn gcn_normalize(adj: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let (r, c) = adj.dim();
    if r != c {
        return Err(HgnnError::DimMismatch(format!("adjacency is {r}x{c}")));
    }
    for i in 0..r {
        for j in 0..i {
            let diff = (adj[[i, j]] - adj[[j, i]]).abs();
            if !(diff <= 1e-12 * adj[[i, j]].abs().max(1.0)) {
                return Err(HgnnError::NotSymmetric {
                    row: i,
                    col: j,
                    diff,
                });
            }
        }
    }
    let degrees: Vec<f64> = adj.rows().into_iter().map(|row| row.sum()).collect();
    let s = inv_sqrt(&degrees);
    let mut out = adj.to_owned();
    for ((i, j), v) in out.indexed_iter_mut() {
        *v *= s[i] * s[j];
    }
    Ok(out)
}

/// GCN propagation `D^{-1/2} A D^{-1/2} X W` on a dense adjacency.
pub fn gcn_forward(
    adj: ArrayView2<'_, f64>,
    x: ArrayView2<'_, f64>,
    layer: &LayerParams,
) -> Result<Array2<f64>> {
    let norm = gcn_normalize(adj)?;
    if x.nrows() != norm.nrows() || x.ncols() != layer.c_in() {
        return Err(HgnnError::DimMismatch(format!(
            "features {:?} against adjacency {:?} and filter {:?}",
            x.dim(),
            norm.dim(),
            layer.weight.dim()
        )));
    }
    let prop = CsrMatrix::from_dense(norm.view(), 0.0);
    propagate_project(&prop, x, layer.weight.view())
}
