use frozenrank::randgraph::{
    karp_sipser, nullity_invariance_check, sample_a, sample_graph, sample_t, CouplingSource, Graph,
    LeafOrder, Permutation, WeightTemplate,
};
use frozenrank::seed::hash_words;
use frozenrank::FieldSpec;
use proptest::prelude::*;

fn edge_set(g: &Graph) -> Vec<(usize, usize)> {
    g.edges().iter().map(|(i, j, _)| (*i, *j)).collect()
}

#[test]
fn leaf_removal_outcome_ignores_order() {
    for k in 0..50u64 {
        let g = sample_graph(
            60,
            3.0 / 60.0,
            &WeightTemplate::AllOnes,
            &CouplingSource::new(hash_words(0x4B53, &[k])),
            FieldSpec::F2,
        );
        let base = karp_sipser(&g, LeafOrder::SmallestIndex);
        for s in 0..20 {
            let other = karp_sipser(&g, LeafOrder::Random(hash_words(k, &[s])));
            assert_eq!(
                other.isolated_count(),
                base.isolated_count(),
                "graph {k} order {s}"
            );
            assert_eq!(
                other.core_vertices, base.core_vertices,
                "graph {k} order {s}"
            );
        }
    }
}

#[test]
fn full_permuted_t_has_the_rank_of_a() {
    let n = 30;
    for k in 0..20u64 {
        let coupling = CouplingSource::new(hash_words(0x7A, &[k]));
        let template = WeightTemplate::SeededRandomNonzero(k);
        let f5 = FieldSpec::prime(5).unwrap();
        let a = sample_a(n, 0.1, &template, &coupling, f5);
        let t = sample_t(
            n,
            0.1,
            &template,
            &coupling,
            f5,
            &Permutation::uniform(n, k),
        )
        .unwrap();
        assert_eq!(t.rank(), a.rank(), "draw {k}");
    }
}

#[test]
fn t_rejects_n_above_big_n() {
    let perm = Permutation::identity(5);
    let coupling = CouplingSource::new(1);
    assert!(sample_t(
        6,
        0.5,
        &WeightTemplate::AllOnes,
        &coupling,
        FieldSpec::F2,
        &perm
    )
    .is_err());
}

#[test]
fn nullity_invariance_over_rationals() {
    for k in 0..10u64 {
        let g = sample_graph(
            40,
            2.5 / 40.0,
            &WeightTemplate::SeededRandomNonzero(k),
            &CouplingSource::new(k),
            FieldSpec::Q,
        );
        assert!(nullity_invariance_check(&g, 2000).unwrap(), "graph {k}");
    }
}

#[test]
fn nullity_check_respects_its_cap() {
    let g = Graph::empty(30, FieldSpec::F2);
    assert!(nullity_invariance_check(&g, 29).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coupling_is_monotone_in_p(seed: u64, n in 2usize..60, p1 in 0.0f64..1.0, p2 in 0.0f64..1.0) {
        let (lo, hi) = (p1.min(p2), p1.max(p2));
        let c = CouplingSource::new(seed);
        let small = edge_set(&sample_graph(n, lo, &WeightTemplate::AllOnes, &c, FieldSpec::F2));
        let big = edge_set(&sample_graph(n, hi, &WeightTemplate::AllOnes, &c, FieldSpec::F2));
        prop_assert!(small.iter().all(|e| big.contains(e)));
    }

    #[test]
    fn leaf_removal_bounds_rank(seed: u64, n in 1usize..150, d in 0.0f64..5.0, f in 0usize..3) {
        let field = FieldSpec::prime([2, 3, 5][f]).unwrap();
        let g = sample_graph(
            n,
            (d / n as f64).min(1.0),
            &WeightTemplate::SeededRandomNonzero(seed ^ 1),
            &CouplingSource::new(seed),
            field,
        );
        let ks = karp_sipser(&g, LeafOrder::SmallestIndex);
        prop_assert_eq!(ks.isolated_count() + ks.core_vertices.len() + 2 * ks.removed_pairs.len(), n);
        prop_assert!((0..ks.core.vertex_count()).all(|v| ks.core.degree(v) >= 2));
        prop_assert!(g.adjacency_matrix().rank() + ks.isolated_count() <= n);
        prop_assert!(nullity_invariance_check(&g, 2000).unwrap());
    }

    #[test]
    fn t_is_nested_in_n(seed: u64, n in 1usize..30, extra in 1usize..10) {
        let big_n = n + extra;
        let perm = Permutation::uniform(big_n, seed);
        let c = CouplingSource::new(seed.rotate_left(7));
        let t = sample_t(n, 0.3, &WeightTemplate::AllOnes, &c, FieldSpec::F2, &perm).unwrap();
        let t1 = sample_t(n + 1, 0.3, &WeightTemplate::AllOnes, &c, FieldSpec::F2, &perm).unwrap();
        let idx = frozenrank::IndexSet::from([n]);
        prop_assert_eq!(t1.remove(&idx, &idx).unwrap(), t);
    }

    #[test]
    fn graph_dump_round_trips(seed: u64, n in 1usize..40) {
        let g = sample_graph(
            n,
            0.2,
            &WeightTemplate::SeededRandomNonzero(seed),
            &CouplingSource::new(seed),
            FieldSpec::prime(7).unwrap(),
        );
        prop_assert_eq!(Graph::parse_text(&g.to_text()).unwrap(), g);
    }
}
