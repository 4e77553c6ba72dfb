use std::collections::BTreeMap;

use nalgebra::DMatrix;
use proptest::prelude::*;

use signclust::eigen::dense_sym_eigenvalues;
use signclust::graph::{build_from_edges, degrees, largest_connected_component, read_graph, write_edge_list, Regularization, SignedGraph};
use signclust::kmeans::{kmeanspp_seed, lloyd};
use signclust::metrics::{ari, misclustering_rate};
use signclust::operators::{
    adjacency_operator, regularized_sym_signed_laplacian_with, signed_laplacian, sponge_sym_pencil_with,
    sym_signed_laplacian_with, LinearOperator, ZeroDegree,
};
use signclust::rng;
use signclust::ssbm::Partition;

/// Random simple signed graph: raw pairs are deduplicated and self loops dropped.
fn graph_strategy() -> impl Strategy<Value = SignedGraph> {
    (3usize..28).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, any::<bool>(), 0.1f64..3.0), 0..(3 * n)).prop_map(move |raw| {
            let mut pairs = BTreeMap::new();
            for (i, j, pos, w) in raw {
                if i != j {
                    pairs.entry((i.min(j), i.max(j))).or_insert(if pos { w } else { -w });
                }
            }
            let edges: Vec<_> = pairs.into_iter().map(|((i, j), w)| (i, j, w)).collect();
            build_from_edges(n, &edges).unwrap()
        })
    })
}

fn partition_pair() -> impl Strategy<Value = (Partition, Partition)> {
    (1usize..30, 1usize..5, 1usize..5).prop_flat_map(|(n, ka, kb)| {
        (prop::collection::vec(0..ka, n), prop::collection::vec(0..kb, n))
            .prop_map(move |(a, b)| (Partition::new(a, ka).unwrap(), Partition::new(b, kb).unwrap()))
    })
}

fn symmetric_gap(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_splits_into_disjoint_parts(g in graph_strategy()) {
        let a = g.adjacency().to_dense();
        let ap = g.positive().to_dense();
        let an = g.negative().to_dense();
        prop_assert_eq!(symmetric_gap(&a), 0.0);
        prop_assert!((&a - (&ap - &an)).amax() == 0.0);
        for (x, y) in ap.iter().zip(an.iter()) {
            prop_assert!(*x >= 0.0 && *y >= 0.0 && (*x == 0.0 || *y == 0.0));
        }
        let d = degrees(&g);
        for i in 0..g.n() {
            let rp: f64 = ap.row(i).sum();
            let rn: f64 = an.row(i).sum();
            prop_assert!((d.dplus[i] - rp).abs() < 1e-12);
            prop_assert!((d.dminus[i] - rn).abs() < 1e-12);
            prop_assert!((d.dbar[i] - rp - rn).abs() < 1e-12);
        }
    }

    #[test]
    fn edge_list_round_trip(g in graph_strategy()) {
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = read_graph(&buf[..]).unwrap();
        prop_assert_eq!(back.n(), g.n());
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn lcc_is_connected_and_maximal(g in graph_strategy()) {
        let (sub, map) = largest_connected_component(&g);
        prop_assert_eq!(map.new_to_old.len(), sub.n());
        for (new, &old) in map.new_to_old.iter().enumerate() {
            prop_assert_eq!(map.old_to_new[old], Some(new));
        }
        let comps = signclust::graph::connected_components(&g);
        let biggest = comps.iter().map(|c| c.len()).max().unwrap_or(0);
        prop_assert_eq!(sub.n(), biggest);
        prop_assert_eq!(signclust::graph::connected_components(&sub).len(), 1);
    }

    #[test]
    fn laplacians_are_symmetric_with_bounded_spectrum(g in graph_strategy(), gamma in 0.0f64..20.0) {
        let l = signed_laplacian(&g).to_dense().unwrap();
        prop_assert!(symmetric_gap(&l) < 1e-12);
        prop_assert!(dense_sym_eigenvalues(&l).unwrap()[0] > -1e-9);
        let ls = sym_signed_laplacian_with(&g, ZeroDegree::UnitRow).unwrap().to_dense().unwrap();
        let lg = regularized_sym_signed_laplacian_with(&g, Regularization::even(gamma).unwrap(), ZeroDegree::UnitRow)
            .unwrap()
            .to_dense()
            .unwrap();
        for m in [&ls, &lg] {
            prop_assert!(symmetric_gap(m) < 1e-12);
            for v in dense_sym_eigenvalues(m).unwrap() {
                prop_assert!((-1e-9..=2.0 + 1e-9).contains(&v), "eigenvalue {}", v);
            }
        }
    }

    #[test]
    fn operator_apply_matches_materialized(g in graph_strategy(), seed in any::<u64>()) {
        use rand::Rng;
        let op = adjacency_operator(&g);
        let dense = op.materialize();
        let mut r = rng::rng(seed);
        let x: Vec<f64> = (0..g.n()).map(|_| r.random_range(-1.0..1.0)).collect();
        let mut y = vec![0.0; g.n()];
        op.apply(&x, &mut y);
        let expect = &dense * nalgebra::DVector::from_vec(x);
        for i in 0..g.n() {
            prop_assert!((y[i] - expect[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn sponge_denominator_is_positive_definite(g in graph_strategy(), t in 0.01f64..5.0) {
        let p = sponge_sym_pencil_with(&g, t, t, Regularization::none(), ZeroDegree::UnitRow).unwrap();
        let den = p.denominator.to_dense().unwrap();
        prop_assert!(dense_sym_eigenvalues(&den).unwrap()[0] >= t - 1e-9);
    }

    #[test]
    fn ari_is_symmetric_and_label_invariant((a, b) in partition_pair(), shift in 0usize..4) {
        let ab = ari(&a, &b).unwrap();
        prop_assert!((ab - ari(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(ab <= 1.0 + 1e-12);
        prop_assert!((ari(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let relabeled = Partition::new(a.labels.iter().map(|&l| (l + shift) % a.k).collect(), a.k).unwrap();
        prop_assert!((ari(&relabeled, &b).unwrap() - ab).abs() < 1e-12);
    }

    #[test]
    fn misclustering_is_permutation_invariant((a, b) in partition_pair(), shift in 0usize..4) {
        let k = a.k.max(b.k);
        let a = Partition::new(a.labels.clone(), k).unwrap();
        let b = Partition::new(b.labels.clone(), k).unwrap();
        let (rate, perm) = misclustering_rate(&a, &b).unwrap();
        prop_assert!((0.0..=1.0 - 1.0 / k as f64 + 1e-12).contains(&rate));
        let mut seen = perm.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..k).collect::<Vec<_>>());
        let relabeled = Partition::new(a.labels.iter().map(|&l| (l + shift) % k).collect(), k).unwrap();
        prop_assert!((misclustering_rate(&relabeled, &b).unwrap().0 - rate).abs() < 1e-12);
        prop_assert_eq!(misclustering_rate(&b, &b).unwrap().0, 0.0);
    }

    #[test]
    fn lloyd_cost_never_increases(n in 4usize..60, k in 1usize..4, seed in any::<u64>()) {
        use rand::Rng;
        let mut r = rng::rng(seed);
        let pts = DMatrix::from_fn(n, 3, |_, _| r.random_range(-1.0..1.0));
        let centers = kmeanspp_seed(&pts, k, seed).unwrap();
        let res = lloyd(&pts, &centers, 100, 0.0);
        for w in res.cost_trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9);
        }
        prop_assert_eq!(res.partition.len(), n);
    }

    #[test]
    fn derived_seeds_are_stable(seed in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        prop_assert_eq!(rng::derive(seed, &[a, b]), rng::derive(seed, &[a, b]));
        if a != b {
            prop_assert_ne!(rng::derive(seed, &[a]), rng::derive(seed, &[b]));
        }
    }
}
