//! Compressed sparse row storage and the handful of kernels the rest of the
//! crate needs: sparse × dense products and sparse × vector products.
//!
//! Every output row is reduced sequentially in ascending column order, so the
//! result is bit-identical regardless of how many threads rayon runs with.

use ndarray::{Array2, ArrayView2, Axis};
use rayon::prelude::*;

use crate::error::{HgnnError, Result};

/// Row-compressed real matrix. Column indices are strictly ascending within
/// each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Assemble from raw parts, validating the layout.
    pub fn from_parts(
        n_rows: usize,
        n_cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if indptr.len() != n_rows + 1 || indptr[0] != 0 {
            return Err(HgnnError::ShapeMismatch(format!(
                "indptr has length {} for {} rows",
                indptr.len(),
                n_rows
            )));
        }
        if indices.len() != values.len() || *indptr.last().unwrap() != indices.len() {
            return Err(HgnnError::ShapeMismatch(
                "indices/values/indptr disagree on nnz".into(),
            ));
        }
        for row in 0..n_rows {
            let (lo, hi) = (indptr[row], indptr[row + 1]);
            if lo > hi {
                return Err(HgnnError::ShapeMismatch("indptr not monotone".into()));
            }
            let cols = &indices[lo..hi];
            if cols.iter().any(|&c| c >= n_cols) || cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(HgnnError::ShapeMismatch(format!(
                    "row {row}: column indices must be ascending and < {n_cols}"
                )));
            }
        }
        Ok(CsrMatrix {
            n_rows,
            n_cols,
            indptr,
            indices,
            values,
        })
    }

    pub(crate) fn from_parts_unchecked(
        n_rows: usize,
        n_cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(indptr.len(), n_rows + 1);
        debug_assert_eq!(indices.len(), values.len());
        CsrMatrix {
            n_rows,
            n_cols,
            indptr,
            indices,
            values,
        }
    }

    /// Drop entries whose magnitude is at most `tol`.
    pub fn from_dense(dense: ArrayView2<'_, f64>, tol: f64) -> Self {
        let (n_rows, n_cols) = dense.dim();
        let mut indptr = Vec::with_capacity(n_rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in dense.axis_iter(Axis(0)) {
            for (j, &v) in row.iter().enumerate() {
                if v.abs() > tol {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            n_rows,
            n_cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(column, value)` pairs of one row.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    /// Entry lookup by binary search; absent entries are zero.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        match self.indices[lo..hi].binary_search(&j) {
            Ok(pos) => self.values[lo + pos],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.n_rows, self.n_cols));
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                out[[i, j]] = v;
            }
        }
        out
    }

    /// `self · x` for a vector.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(HgnnError::DimMismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.n_cols
            )));
        }
        Ok((0..self.n_rows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect())
    }

    /// `self · dense`, rows computed in parallel.
    pub fn mul_dense(&self, dense: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let (rows, cols) = dense.dim();
        if rows != self.n_cols {
            return Err(HgnnError::DimMismatch(format!(
                "sparse {}x{} times dense {}x{}",
                self.n_rows, self.n_cols, rows, cols
            )));
        }
        let mut out = Array2::<f64>::zeros((self.n_rows, cols));
        out.axis_iter_mut(Axis(0))
            .into_par_iter()
            .enumerate()
            .for_each(|(i, mut out_row)| {
                for (j, v) in self.row(i) {
                    out_row.scaled_add(v, &dense.row(j));
                }
            });
        Ok(out)
    }

    /// Largest `|a_ij - a_ji|` over stored and implied entries.
    pub fn max_asymmetry(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                let t = if j < self.n_rows { self.get(j, i) } else { 0.0 };
                let d = (v - t).abs();
                if d > worst.2 {
                    worst = (i, j, d);
                }
            }
        }
        worst
    }
}
