//! Dense small-n spectral tools on the hypergraph Laplacian: eigendecomposition,
//! exact spectral filtering, truncated Chebyshev filtering and the smoothness
//! regularizer.
//!
//! None of this is on the training path. It exists to check the algebra the
//! hyperedge convolution is derived from.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{HgnnError, Result};
use crate::hypergraph::{inv_sqrt, Hypergraph};
use crate::sparse::CsrMatrix;

/// Size cap for the dense eigensolver.
pub const MAX_DENSE_N: usize = 2000;

/// Default spectral radius used to rescale the Laplacian.
pub const DEFAULT_LAMBDA_MAX: f64 = 2.0;

/// Something that can multiply a vector.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

impl LinearOperator for Array2<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows()
            .into_iter()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n_rows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_rows())
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Array1<f64>,
    /// Orthonormal columns, each with its first non-negligible entry positive.
    pub eigenvectors: Array2<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Φ Λ Φᵀ`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let scaled = &self.eigenvectors * &self.eigenvalues;
        scaled.dot(&self.eigenvectors.t())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevCoefficients {
    thetas: Vec<f64>,
    lambda_max: f64,
}

impl ChebyshevCoefficients {
    /// `thetas[k]` multiplies `T_k`. At least one coefficient is required.
    pub fn new(thetas: Vec<f64>, lambda_max: f64) -> Result<Self> {
        if thetas.is_empty() {
            return Err(HgnnError::InvalidConfig(
                "need at least one Chebyshev coefficient".into(),
            ));
        }
        if !(lambda_max > 0.0 && lambda_max.is_finite()) {
            return Err(HgnnError::InvalidConfig(format!(
                "lambda_max must be positive, got {lambda_max}"
            )));
        }
        Ok(ChebyshevCoefficients { thetas, lambda_max })
    }

    pub fn order(&self) -> usize {
        self.thetas.len() - 1
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }
}

fn check_symmetric(a: ArrayView2<'_, f64>) -> Result<()> {
    let (r, c) = a.dim();
    if r != c {
        return Err(HgnnError::DimMismatch(format!("matrix is {r}x{c}")));
    }
    let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for i in 0..r {
        for j in 0..i {
            let (x, y) = (a[[i, j]], a[[j, i]]);
            let diff = (x - y).abs();
            if !x.is_finite() || !y.is_finite() || diff > 1e-12 * scale {
                return Err(HgnnError::NotSymmetric {
                    row: i,
                    col: j,
                    diff,
                });
            }
        }
        if !a[[i, i]].is_finite() {
            return Err(HgnnError::NotSymmetric {
                row: i,
                col: i,
                diff: f64::NAN,
            });
        }
    }
    Ok(())
}

/// Symmetric eigendecomposition by Householder tridiagonalization followed by
/// implicit QL iterations.
pub fn eigendecompose(delta: ArrayView2<'_, f64>) -> Result<SpectralDecomposition> {
    let n = delta.nrows();
    if n > MAX_DENSE_N {
        return Err(HgnnError::TooLarge {
            n,
            limit: MAX_DENSE_N,
        });
    }
    check_symmetric(delta)?;
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Array1::zeros(0),
            eigenvectors: Array2::zeros((0, 0)),
        });
    }

    let mut v: Vec<Vec<f64>> = (0..n).map(|i| delta.row(i).to_vec()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    tridiagonal_ql(&mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues = Array1::from_iter(order.iter().map(|&k| d[k]));
    let mut eigenvectors = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        let lead = (0..n).map(|i| v[i][k]).find(|x| x.abs() > 1e-10).unwrap_or(1.0);
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            eigenvectors[[i, col]] = sign * v[i][k];
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

// Householder reduction to tridiagonal form. On exit `v` holds the
// accumulated orthogonal transform, `d` the diagonal and `e[1..]` the
// subdiagonal.
fn tridiagonalize(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    d.copy_from_slice(&v[n - 1]);

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..(n - 1) {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal matrix, rotating `v` along.
fn tridiagonal_ql(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(HgnnError::InvalidConfig(
                        "QL iteration failed to converge".into(),
                    ));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut() {
                        h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// `Φ g(Λ) Φᵀ x`.
pub fn exact_spectral_filter<G>(x: &[f64], g: G, dec: &SpectralDecomposition) -> Result<Vec<f64>>
where
    G: Fn(f64) -> f64,
{
    if x.len() != dec.n() {
        return Err(HgnnError::DimMismatch(format!(
            "signal of length {} for {} eigenpairs",
            x.len(),
            dec.n()
        )));
    }
    let xv = Array1::from(x.to_vec());
    let mut spectrum = dec.eigenvectors.t().dot(&xv);
    for (s, &lam) in spectrum.iter_mut().zip(dec.eigenvalues.iter()) {
        *s *= g(lam);
    }
    Ok(dec.eigenvectors.dot(&spectrum).to_vec())
}

/// `Σ_k θ_k T_k(Δ̃) x` with `Δ̃ = (2/λ_max) Δ - I`, evaluated by the three-term
/// recurrence on vectors.
pub fn chebyshev_filter<L>(x: &[f64], coeffs: &ChebyshevCoefficients, delta: &L) -> Result<Vec<f64>>
where
    L: LinearOperator + ?Sized,
{
    let n = delta.dim();
    if x.len() != n {
        return Err(HgnnError::DimMismatch(format!(
            "signal of length {} for operator of size {n}",
            x.len()
        )));
    }
    let scale = 2.0 / coeffs.lambda_max;
    let scaled = |v: &[f64]| -> Vec<f64> {
        delta
            .apply(v)
            .into_iter()
            .zip(v)
            .map(|(dv, vi)| scale * dv - vi)
            .collect()
    };

    let thetas = coeffs.thetas();
    let mut out: Vec<f64> = x.iter().map(|v| thetas[0] * v).collect();
    if thetas.len() == 1 {
        return Ok(out);
    }
    let mut prev = x.to_vec();
    let mut cur = scaled(x);
    for (o, c) in out.iter_mut().zip(&cur) {
        *o += thetas[1] * c;
    }
    for &theta in &thetas[2..] {
        let next: Vec<f64> = scaled(&cur)
            .into_iter()
            .zip(&prev)
            .map(|(a, p)| 2.0 * a - p)
            .collect();
        for (o, c) in out.iter_mut().zip(&next) {
            *o += theta * c;
        }
        prev = cur;
        cur = next;
    }
    Ok(out)
}

/// First-order filter with the single-parameter tying
/// `θ_1 = -θ/2`, `θ_0 = (θ/2) Dv^{-1/2} H De^{-1} Hᵀ Dv^{-1/2}` and `λ_max = 2`.
///
/// Equals `(θ/2) Dv^{-1/2} H (W + I) De^{-1} Hᵀ Dv^{-1/2} x`, which is `θ Θ x`
/// when `W = I`.
pub fn first_order_tied_filter(g: &Hypergraph, theta: f64, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != g.n_vertices() {
        return Err(HgnnError::DimMismatch(format!(
            "signal of length {} for {} vertices",
            x.len(),
            g.n_vertices()
        )));
    }
    let inv_sqrt_dv = inv_sqrt(&g.degrees().vertex_degrees);
    let unit = vec![1.0; g.n_edges()];
    let theta0 = g.normalized_operator_with(&unit, &inv_sqrt_dv);
    let zeroth = theta0.theta().mul_vec(x)?;

    let laplacian = g.normalized_theta().laplacian();
    let coeffs = ChebyshevCoefficients::new(vec![0.0, -theta / 2.0], DEFAULT_LAMBDA_MAX)?;
    let first = chebyshev_filter(x, &coeffs, &laplacian)?;
    Ok(zeroth
        .into_iter()
        .zip(first)
        .map(|(a, b)| 0.5 * theta * a + b)
        .collect())
}

/// Power-iteration estimate of the largest eigenvalue of a symmetric PSD
/// operator. Stops after `max_iter` steps or once successive Rayleigh
/// quotients differ by less than `tol`.
pub fn estimate_lambda_max<L>(op: &L, max_iter: usize, tol: f64) -> f64
where
    L: LinearOperator + ?Sized,
{
    let n = op.dim();
    if n == 0 {
        return 0.0;
    }
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 + 1.0) / n as f64).collect();
    normalize(&mut v);
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let mut w = op.apply(&v);
        let next: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        if normalize(&mut w) == 0.0 {
            return 0.0;
        }
        v = w;
        let done = (next - lambda).abs() < tol;
        lambda = next;
        if done {
            break;
        }
    }
    lambda
}

/// Power-iteration defaults: 50 steps, tolerance 1e-6.
pub fn estimate_lambda_max_default<L: LinearOperator + ?Sized>(op: &L) -> f64 {
    estimate_lambda_max(op, 50, 1e-6)
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Hypergraph smoothness regularizer evaluated as the pairwise double sum
/// `½ Σ_e Σ_{u,v ∈ e} w(e)/δ(e) (f(u)/√d(u) - f(v)/√d(v))²`.
///
/// Agrees with `fᵀ Δ f` whenever `f` vanishes on isolated vertices.
pub fn regularizer_omega(g: &Hypergraph, f: &[f64]) -> Result<f64> {
    if f.len() != g.n_vertices() {
        return Err(HgnnError::DimMismatch(format!(
            "signal of length {} for {} vertices",
            f.len(),
            g.n_vertices()
        )));
    }
    let inv_sqrt_dv = inv_sqrt(&g.degrees().vertex_degrees);
    let scaled: Vec<f64> = f.iter().zip(&inv_sqrt_dv).map(|(a, b)| a * b).collect();
    let mut total = 0.0;
    for (e, members) in g.hyperedges().enumerate() {
        let c = g.weights()[e] / members.len() as f64;
        let mut inner = 0.0;
        for &u in members {
            for &v in members {
                let diff = scaled[u] - scaled[v];
                inner += diff * diff;
            }
        }
        total += c * inner;
    }
    Ok(0.5 * total)
}

/// `fᵀ Δ f` through the normalized operator.
pub fn laplacian_quadratic_form(g: &Hypergraph, f: &[f64]) -> Result<f64> {
    let lf = g.normalized_theta().apply_laplacian(f)?;
    Ok(f.iter().zip(lf).map(|(a, b)| a * b).sum())
}
