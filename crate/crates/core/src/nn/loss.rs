use ndarray::{Array2, ArrayView2};

use crate::data::LabelVector;
use crate::error::{HgnnError, Result};

/// Row-wise softmax over all rows and the mean negative log-likelihood over
/// the rows listed in `mask`.
pub fn softmax_cross_entropy(
    logits: ArrayView2<'_, f64>,
    labels: &LabelVector,
    mask: &[usize],
) -> Result<(f64, Array2<f64>)> {
    if mask.is_empty() {
        return Err(HgnnError::EmptyMask);
    }
    let (n, c) = logits.dim();
    if labels.len() != n {
        return Err(HgnnError::DimMismatch(format!(
            "{} labels for {n} logit rows",
            labels.len()
        )));
    }
    let mut probs = Array2::zeros((n, c));
    let mut log_norm = vec![0.0; n];
    for (i, row) in logits.rows().into_iter().enumerate() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for (p, &z) in probs.row_mut(i).iter_mut().zip(row.iter()) {
            *p = (z - max).exp();
            sum += *p;
        }
        probs.row_mut(i).mapv_inplace(|p| p / sum);
        log_norm[i] = max + sum.ln();
    }
    let mut loss = 0.0;
    for &i in mask {
        if i >= n {
            return Err(HgnnError::IndexOutOfRange {
                index: i,
                n_vertices: n,
            });
        }
        let y = labels.get(i);
        if y >= c {
            return Err(HgnnError::InvalidLabel {
                label: y,
                n_classes: c,
            });
        }
        loss += log_norm[i] - logits[[i, y]];
    }
    Ok((loss / mask.len() as f64, probs))
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(row: ndarray::ArrayView1<'_, f64>) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = j;
        }
    }
    best
}

/// Fraction of `index_set` rows whose argmax equals the label.
pub fn accuracy(logits: ArrayView2<'_, f64>, labels: &LabelVector, index_set: &[usize]) -> Result<f64> {
    if index_set.is_empty() {
        return Err(HgnnError::EmptyMask);
    }
    let mut correct = 0usize;
    for &i in index_set {
        if i >= logits.nrows() {
            return Err(HgnnError::IndexOutOfRange {
                index: i,
                n_vertices: logits.nrows(),
            });
        }
        if argmax(logits.row(i)) == labels.get(i) {
            correct += 1;
        }
    }
    Ok(correct as f64 / index_set.len() as f64)
}
