#![allow(dead_code)]

use hgnn_core::construction::{knn_hyperedges, EdgeList, FeatureMatrix};
use hgnn_core::nn::{
    evaluate, softmax_cross_entropy, train, Activation, HgnnModel, LayerParams, Mode, TrainConfig,
};
use hgnn_core::spectral::{
    chebyshev_filter, eigendecompose, exact_spectral_filter, first_order_tied_filter,
    laplacian_quadratic_form, regularizer_omega, ChebyshevCoefficients,
};
use hgnn_core::{concat_modalities, graph_neighborhood_hyperedges, Hypergraph, LabelVector, SplitSpec};
use nalgebra::DMatrix;
use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random hyperedges of size 1..=max_size, possibly leaving vertices isolated.
pub fn random_hypergraph<R: Rng>(
    rng: &mut R,
    n: usize,
    n_edges: usize,
    max_size: usize,
    weighted: bool,
) -> Hypergraph {
    let all: Vec<usize> = (0..n).collect();
    let edges: Vec<Vec<usize>> = (0..n_edges)
        .map(|_| {
            let size = rng.gen_range(1..=max_size.min(n));
            all.choose_multiple(rng, size).copied().collect()
        })
        .collect();
    let weights: Vec<f64> = (0..n_edges)
        .map(|_| if weighted { 4.0 - rng.gen_range(0.0..4.0) } else { 1.0 })
        .collect();
    Hypergraph::new(&edges, n, Some(&weights)).unwrap()
}

/// Same as [`random_hypergraph`] but every vertex lies in some hyperedge.
pub fn random_covering_hypergraph<R: Rng>(
    rng: &mut R,
    n: usize,
    n_edges: usize,
    max_size: usize,
    weighted: bool,
) -> Hypergraph {
    let g = random_hypergraph(rng, n, n_edges, max_size, weighted);
    let mut edges: Vec<Vec<usize>> = g.hyperedges().map(|e| e.to_vec()).collect();
    let mut weights = g.weights().to_vec();
    let covered = g.degrees().vertex_degrees;
    for v in (0..n).filter(|&v| covered[v] == 0.0) {
        let u = (v + 1) % n;
        edges.push(if u == v { vec![v] } else { vec![v, u] });
        weights.push(if weighted { 4.0 - rng.gen_range(0.0..4.0) } else { 1.0 });
    }
    Hypergraph::new(&edges, n, Some(&weights)).unwrap()
}

/// Random simple graph on `n ≥ 2` vertices in which every vertex has an edge.
pub fn random_graph_without_isolated<R: Rng>(rng: &mut R, n: usize) -> EdgeList {
    let p = rng.gen_range(0.1..0.6);
    let mut pairs = Vec::new();
    let mut deg = vec![0usize; n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                pairs.push((u, v));
                deg[u] += 1;
                deg[v] += 1;
            }
        }
    }
    for u in 0..n {
        if deg[u] == 0 {
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            pairs.push((u.min(v), u.max(v)));
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    EdgeList::new(pairs, n).unwrap()
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(rng))
}

pub fn gaussian_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn inv_sqrt(d: f64) -> f64 {
    if d > 0.0 {
        1.0 / d.sqrt()
    } else {
        0.0
    }
}

/// Dense `Dv^{-1/2} H diag(edge_scale) De^{-1} Hᵀ Dv^{-1/2}` with `Dv` from the
/// stored weights, built from the incidence matrix alone.
pub fn dense_operator(g: &Hypergraph, edge_scale: &[f64]) -> Array2<f64> {
    let h = g.incidence_dense();
    let w = Array1::from(g.weights().to_vec());
    let dv = h.dot(&w);
    let de = h.sum_axis(ndarray::Axis(0));
    let mut core = Array2::<f64>::zeros((g.n_edges(), g.n_edges()));
    for e in 0..g.n_edges() {
        core[[e, e]] = edge_scale[e] / de[e];
    }
    let s = Array2::from_diag(&dv.mapv(inv_sqrt));
    s.dot(&h).dot(&core).dot(&h.t()).dot(&s)
}

pub fn dense_theta(g: &Hypergraph) -> Array2<f64> {
    dense_operator(g, g.weights())
}

pub fn to_nalgebra(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Max entrywise gap between the hypergraph Laplacian of a 2-uniform,
/// unit-weight encoding and half the normalized graph Laplacian.
pub fn gcn_reduction_error<R: Rng>(rng: &mut R, max_n: usize) -> f64 {
    let n = rng.gen_range(2..=max_n);
    let edges = random_graph_without_isolated(rng, n);
    let edge_sets: Vec<Vec<usize>> = edges.pairs().iter().map(|&(u, v)| vec![u, v]).collect();
    let g = Hypergraph::new(&edge_sets, n, None).unwrap();
    let lap = g.normalized_theta().laplacian().to_dense();

    let a = edges.adjacency_dense(n);
    let deg = a.sum_axis(ndarray::Axis(1));
    let mut want = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            want[[i, j]] = 0.5 * (delta - a[[i, j]] / (deg[i] * deg[j]).sqrt());
        }
    }
    max_abs_diff(lap.as_slice().unwrap(), want.as_slice().unwrap())
}

/// Relative gap between the pairwise regularizer and `fᵀΔf`.
pub fn regularizer_rel_error<R: Rng>(rng: &mut R) -> f64 {
    let n = rng.gen_range(2..=20);
    let e = rng.gen_range(1..=30);
    let g = random_covering_hypergraph(rng, n, e, 6, true);
    let f = gaussian_vec(rng, n);
    let omega = regularizer_omega(&g, &f).unwrap();
    let quad = laplacian_quadratic_form(&g, &f).unwrap();
    // Independent dense evaluation guards against a shared bug.
    let lap = Array2::<f64>::eye(n) - dense_theta(&g);
    let fv = Array1::from(f);
    let dense = fv.dot(&lap.dot(&fv));
    let scale = omega.abs().max(quad.abs()).max(1e-300);
    ((omega - quad).abs() / scale).max((omega - dense).abs() / dense.abs().max(1e-300))
}

pub struct SpectrumReport {
    pub min_eigenvalue: f64,
    pub oracle_min_eigenvalue: f64,
    pub nullspace_residual: f64,
    pub asymmetry: f64,
}

/// Smallest eigenvalue of Δ (ours and an independent solver) and the residual
/// of `Δ (Dv^{1/2} 1_S)` for the non-isolated set `S`.
pub fn spectrum_report<R: Rng>(rng: &mut R) -> SpectrumReport {
    let n = rng.gen_range(1..=20);
    let e = rng.gen_range(1..=30);
    let g = random_hypergraph(rng, n, e, 6, true);
    let op = g.normalized_theta();
    let lap = op.laplacian();
    let dense = lap.to_dense();
    let dec = eigendecompose(dense.view()).unwrap();
    let oracle = to_nalgebra(&dense).symmetric_eigen();
    let v: Vec<f64> = g.degrees().vertex_degrees.iter().map(|d| d.sqrt()).collect();
    let residual = op.apply_laplacian(&v).unwrap();
    SpectrumReport {
        min_eigenvalue: dec.eigenvalues[0],
        oracle_min_eigenvalue: oracle.eigenvalues.min(),
        nullspace_residual: residual.iter().fold(0.0, |m, r| m.max(r.abs())),
        asymmetry: lap.max_asymmetry().2,
    }
}

/// `T_k(t)` from the trigonometric / hyperbolic closed forms.
pub fn chebyshev_t(k: usize, t: f64) -> f64 {
    let k = k as f64;
    if t.abs() <= 1.0 {
        (k * t.acos()).cos()
    } else if t > 1.0 {
        (k * t.acosh()).cosh()
    } else {
        let sign = if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
        sign * (k * (-t).acosh()).cosh()
    }
}

/// Max gap between the K=1 tied filter and `θ Θ x` on a unit-weight
/// hypergraph, plus the gap to `(θ/2) Dv^{-1/2} H (W+I) De^{-1} Hᵀ Dv^{-1/2} x`
/// on a weighted one.
pub fn chebyshev_collapse_error<R: Rng>(rng: &mut R) -> (f64, f64) {
    let n = rng.gen_range(1..=20);
    let e = rng.gen_range(1..=30);
    let theta = rng.gen_range(-3.0..3.0);

    let g = random_hypergraph(rng, n, e, 6, false);
    let x = gaussian_vec(rng, n);
    let got = first_order_tied_filter(&g, theta, &x).unwrap();
    let want = (dense_theta(&g) * theta).dot(&Array1::from(x));
    let unit = max_abs_diff(&got, want.as_slice().unwrap());

    let g = random_hypergraph(rng, n, e, 6, true);
    let x = gaussian_vec(rng, n);
    let got = first_order_tied_filter(&g, theta, &x).unwrap();
    let plus_one: Vec<f64> = g.weights().iter().map(|w| w + 1.0).collect();
    let want = (dense_operator(&g, &plus_one) * (theta / 2.0)).dot(&Array1::from(x));
    (unit, max_abs_diff(&got, want.as_slice().unwrap()))
}

/// Max gap between the Chebyshev recurrence and an independent spectral
/// evaluation of the same polynomial, relative to the output scale.
pub fn chebyshev_vs_exact_error<R: Rng>(rng: &mut R) -> f64 {
    let n = rng.gen_range(1..=20);
    let e = rng.gen_range(1..=30);
    let g = random_hypergraph(rng, n, e, 6, true);
    let k = rng.gen_range(0..=8);
    let thetas: Vec<f64> = (0..=k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let lambda_max = if rng.gen_bool(0.5) { 2.0 } else { rng.gen_range(1.0..3.0) };
    let x = gaussian_vec(rng, n);
    let lap = g.normalized_theta().laplacian();

    let coeffs = ChebyshevCoefficients::new(thetas.clone(), lambda_max).unwrap();
    let got = chebyshev_filter(&x, &coeffs, &lap).unwrap();

    let poly = |lam: f64| {
        let t = 2.0 * lam / lambda_max - 1.0;
        thetas.iter().enumerate().map(|(i, th)| th * chebyshev_t(i, t)).sum::<f64>()
    };
    let oracle = to_nalgebra(&lap.to_dense()).symmetric_eigen();
    let xv = nalgebra::DVector::from_vec(x.clone());
    let mut coef = oracle.eigenvectors.transpose() * &xv;
    for (c, &lam) in coef.iter_mut().zip(oracle.eigenvalues.iter()) {
        *c *= poly(lam);
    }
    let want = &oracle.eigenvectors * coef;
    let want: Vec<f64> = want.iter().copied().collect();

    let ours = exact_spectral_filter(&x, poly, &eigendecompose(lap.to_dense().view()).unwrap()).unwrap();
    let scale = want.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    max_abs_diff(&got, &want).max(max_abs_diff(&ours, &want)) / scale
}

pub fn loss_of(
    model: &HgnnModel,
    g: &Hypergraph,
    x: &Array2<f64>,
    labels: &LabelVector,
    mask: &[usize],
) -> f64 {
    let logits = model.predict(&g.normalized_theta(), x.view()).unwrap();
    softmax_cross_entropy(logits.view(), labels, mask).unwrap().0
}

/// Worst entrywise relative error between backprop and central differences
/// with step `h`. Entries where both values are below `floor` in magnitude are
/// compared against `floor` instead.
pub fn gradient_check_error<R: Rng>(rng: &mut R, h: f64, floor: f64) -> f64 {
    let n = rng.gen_range(2..=12);
    let e = rng.gen_range(1..=2 * n);
    let g = random_hypergraph(rng, n, e, 5, true);
    let c_in = rng.gen_range(1..=5);
    let hidden = rng.gen_range(1..=5);
    let classes = rng.gen_range(2..=5);
    let x = gaussian_matrix(rng, n, c_in);
    let labels = LabelVector::new((0..n).map(|_| rng.gen_range(0..classes)).collect(), classes).unwrap();
    let mut mask: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.7)).collect();
    if mask.is_empty() {
        mask.push(0);
    }
    let op = g.normalized_theta();

    // Keep pre-activations away from the ReLU kink so differences are smooth.
    // Exact zeros (isolated vertices) stay zero under any perturbation.
    let model = loop {
        let widths = if rng.gen_bool(0.5) {
            vec![c_in, hidden, classes]
        } else {
            vec![c_in, hidden, hidden, classes]
        };
        let m = HgnnModel::glorot(&widths, rng).unwrap();
        let (_, cache) = m.forward(&op, x.view(), Mode::Eval, rng).unwrap();
        let near_kink = (0..widths.len() - 2).any(|l| {
            let w = &m.layers()[l].weight;
            let input = if l == 0 { x.clone() } else { cache.hidden(l - 1).clone() };
            let z = op.theta().mul_dense(input.dot(w).view()).unwrap();
            z.iter().any(|&v| v != 0.0 && v.abs() < 1e-3)
        });
        if !near_kink {
            break m;
        }
    };

    let (logits, cache) = model.forward(&op, x.view(), Mode::Eval, rng).unwrap();
    let (_, probs) = softmax_cross_entropy(logits.view(), &labels, &mask).unwrap();
    let grads = model.backward(&op, x.view(), &cache, probs.view(), &labels, &mask).unwrap();

    let mut worst = 0.0f64;
    for (l, grad) in grads.iter().enumerate() {
        for idx in ndarray::indices(grad.raw_dim()) {
            let perturbed = |delta: f64| {
                let mut layers: Vec<LayerParams> = model.layers().to_vec();
                layers[l].weight[idx] += delta;
                let m = HgnnModel::from_layers(layers, Activation::Relu).unwrap();
                loss_of(&m, &g, &x, &labels, &mask)
            };
            let numeric = (perturbed(h) - perturbed(-h)) / (2.0 * h);
            let analytic = grad[idx];
            let denom = analytic.abs().max(numeric.abs()).max(floor);
            worst = worst.max((analytic - numeric).abs() / denom);
        }
    }
    worst
}

pub struct FusionData {
    pub a: FeatureMatrix,
    pub b: FeatureMatrix,
    pub labels: LabelVector,
    pub split: SplitSpec,
}

/// Four classes. Modality A separates classes 0 and 1 and lumps 2 with 3;
/// modality B separates 2 and 3 and lumps 0 with 1.
pub fn fusion_data(seed: u64, per_class: usize, dim: usize) -> FusionData {
    let mut rng = rng(seed);
    let n = 4 * per_class;
    let labels: Vec<usize> = (0..n).map(|i| i / per_class).collect();
    let centre = |modality: usize, class: usize| -> usize {
        match (modality, class) {
            (0, 0) | (1, 2) => 0,
            (0, 1) | (1, 3) => 1,
            _ => 2,
        }
    };
    let make = |modality: usize, rng: &mut ChaCha8Rng| {
        let mut m = gaussian_matrix(rng, n, dim) * 0.8;
        for i in 0..n {
            m[[i, centre(modality, labels[i])]] += 3.0;
        }
        FeatureMatrix::new(m).unwrap()
    };
    let a = make(0, &mut rng);
    let b = make(1, &mut rng);

    let (mut train, mut validation, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for c in 0..4 {
        let mut members: Vec<usize> = (c * per_class..(c + 1) * per_class).collect();
        members.shuffle(&mut rng);
        train.extend_from_slice(&members[..5]);
        validation.extend_from_slice(&members[5..10]);
        test.extend_from_slice(&members[10..]);
    }
    FusionData {
        a,
        b,
        labels: LabelVector::new(labels, 4).unwrap(),
        split: SplitSpec::new(train, validation, test, n).unwrap(),
    }
}

pub fn fusion_config(seed: u64) -> TrainConfig {
    TrainConfig {
        learning_rate: 0.01,
        epochs: 200,
        seed,
        ..TrainConfig::default()
    }
}

/// Test accuracies of (modality A, modality B, fused) models.
pub fn fusion_run(seed: u64) -> (f64, f64, f64) {
    let data = fusion_data(seed, 40, 8);
    let k = 5;
    let cfg = fusion_config(seed);
    let ga = knn_hyperedges(&data.a, k).unwrap();
    let gb = knn_hyperedges(&data.b, k).unwrap();
    let run = |g: &Hypergraph, x: &FeatureMatrix| {
        let (model, _) = train(g, x, &data.labels, &data.split, &cfg).unwrap();
        evaluate(&model, g, x, &data.labels, &data.split.test).unwrap()
    };
    let fused_g = concat_modalities(&[ga.clone(), gb.clone()]).unwrap();
    let fused_x = FeatureMatrix::hstack(&[&data.a, &data.b]).unwrap();
    (run(&ga, &data.a), run(&gb, &data.b), run(&fused_g, &fused_x))
}

/// Two Gaussian blobs, separable by direction.
pub fn two_clusters(seed: u64, n: usize, dim: usize) -> (FeatureMatrix, LabelVector) {
    let mut rng = rng(seed);
    let mut x = gaussian_matrix(&mut rng, n, dim) * 0.5;
    let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    for i in 0..n {
        x[[i, labels[i]]] += 4.0;
    }
    (FeatureMatrix::new(x).unwrap(), LabelVector::new(labels, 2).unwrap())
}

pub fn graph_structure(edges: &EdgeList, n: usize) -> Hypergraph {
    graph_neighborhood_hyperedges(edges, n).unwrap()
}
