mod common;

use hgnn_core::hypergraph::{concat_modalities, Hypergraph};
use hgnn_core::HgnnError;
use proptest::prelude::*;

fn small_graph(seed: u64, n: usize) -> Hypergraph {
    let mut rng = common::rng(seed);
    let e = 1 + (seed % 12) as usize;
    common::random_hypergraph(&mut rng, n, e, 5, seed % 2 == 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn laplacian_is_symmetric_psd(seed in any::<u64>()) {
        let r = common::spectrum_report(&mut common::rng(seed));
        prop_assert_eq!(r.asymmetry, 0.0);
        prop_assert!(r.min_eigenvalue >= -1e-9, "{}", r.min_eigenvalue);
        prop_assert!(r.oracle_min_eigenvalue >= -1e-9);
        prop_assert!(r.nullspace_residual <= 1e-9);
    }

    #[test]
    fn two_uniform_reduces_to_half_graph_laplacian(seed in any::<u64>()) {
        let err = common::gcn_reduction_error(&mut common::rng(seed), 15);
        prop_assert!(err <= 1e-12, "{err}");
    }

    #[test]
    fn theta_matches_dense_oracle(seed in any::<u64>(), n in 1usize..16) {
        let g = small_graph(seed, n);
        let theta = g.normalized_theta().to_dense();
        let want = common::dense_theta(&g);
        prop_assert!(common::max_abs_diff(theta.as_slice().unwrap(), want.as_slice().unwrap()) <= 1e-14);
    }

    #[test]
    fn theta_eigenvalues_lie_in_unit_interval(seed in any::<u64>(), n in 1usize..16) {
        let g = small_graph(seed, n);
        let eig = common::to_nalgebra(&g.normalized_theta().to_dense()).symmetric_eigen();
        prop_assert!(eig.eigenvalues.iter().all(|&l| (-1e-12..=1.0 + 1e-12).contains(&l)));
    }

    #[test]
    fn concat_sums_degrees_and_stacks_columns(
        s1 in any::<u64>(), s2 in any::<u64>(), n in 1usize..12
    ) {
        let (a, b) = (small_graph(s1, n), small_graph(s2, n));
        let c = concat_modalities(&[a.clone(), b.clone()]).unwrap();
        prop_assert_eq!(c.n_edges(), a.n_edges() + b.n_edges());
        let (da, db, dc) = (a.degrees(), b.degrees(), c.degrees());
        for v in 0..n {
            prop_assert!((dc.vertex_degrees[v] - da.vertex_degrees[v] - db.vertex_degrees[v]).abs() <= 1e-12);
        }
        let edges: Vec<&[usize]> = c.hyperedges().collect();
        let expected: Vec<&[usize]> = a.hyperedges().chain(b.hyperedges()).collect();
        prop_assert_eq!(edges, expected);
        let weights: Vec<f64> = a.weights().iter().chain(b.weights()).copied().collect();
        prop_assert_eq!(c.weights(), &weights[..]);
    }

    #[test]
    fn concat_is_associative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), n in 1usize..10) {
        let (a, b, c) = (small_graph(s1, n), small_graph(s2, n), small_graph(s3, n));
        let left = concat_modalities(&[concat_modalities(&[a.clone(), b.clone()]).unwrap(), c.clone()]).unwrap();
        let right = concat_modalities(&[a.clone(), concat_modalities(&[b.clone(), c.clone()]).unwrap()]).unwrap();
        let flat = concat_modalities(&[a, b, c]).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(&left, &flat);
    }

    #[test]
    fn constructor_sorts_and_validates(seed in any::<u64>(), n in 2usize..10) {
        let g = small_graph(seed, n);
        for e in g.hyperedges() {
            prop_assert!(e.windows(2).all(|w| w[0] < w[1]));
        }
        let mut edges: Vec<Vec<usize>> = g.hyperedges().map(|e| e.iter().rev().copied().collect()).collect();
        let again = Hypergraph::new(&edges, n, Some(g.weights())).unwrap();
        prop_assert_eq!(&again, &g);
        let first = edges[0][0];
        edges[0].push(first);
        let duplicate = matches!(
            Hypergraph::new(&edges, n, Some(g.weights())),
            Err(HgnnError::DuplicateVertexInEdge { .. })
        );
        prop_assert!(duplicate);
    }
}

#[test]
fn concat_of_one_is_identity() {
    let g = small_graph(5, 7);
    assert_eq!(concat_modalities(std::slice::from_ref(&g)).unwrap(), g);
}

#[test]
fn concat_rejects_mismatched_vertex_sets() {
    assert!(matches!(
        concat_modalities(&[small_graph(1, 4), small_graph(2, 5)]),
        Err(HgnnError::VertexCountMismatch { .. })
    ));
    assert!(matches!(concat_modalities(&[]), Err(HgnnError::EmptyInputList)));
}

#[test]
fn isolated_vertices_get_zero_rows() {
    let g = Hypergraph::new(&[vec![0, 1]], 3, None).unwrap();
    let theta = g.normalized_theta().to_dense();
    assert!(theta.row(2).iter().all(|&v| v == 0.0));
    assert!(theta.column(2).iter().all(|&v| v == 0.0));
    let lap = g.normalized_theta().laplacian().to_dense();
    assert_eq!(lap[[2, 2]], 1.0);
}
