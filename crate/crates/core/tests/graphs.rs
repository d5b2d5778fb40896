//! Generator invariants and worked examples for the graph module.

use std::collections::BTreeSet;

use proptest::prelude::*;
use semirandom_clique::graphs::{
    cut_graph, sample_er_bipartite, sample_fk, sample_fk_phases, sample_planted_biclique,
    AdditionStrategy, AdversaryPlan, DeletionStrategy, Graph,
};
use semirandom_clique::oracle::enumerate_k_cliques;

fn edge_set(g: &Graph) -> BTreeSet<(usize, usize)> {
    g.edges().iter().copied().collect()
}

fn deletion() -> impl Strategy<Value = DeletionStrategy> {
    prop_oneof![
        Just(DeletionStrategy::None),
        Just(DeletionStrategy::DeleteAllCut),
        (0.0..=1.0f64).prop_map(DeletionStrategy::DeleteRandomCutFraction),
        Just(DeletionStrategy::DegreeFlatten),
    ]
}

fn addition(outside: usize) -> impl Strategy<Value = AdditionStrategy> {
    prop_oneof![
        Just(AdditionStrategy::None),
        (0..=outside).prop_map(AdditionStrategy::FullCliqueOnComplementSubset),
        (0.0..=1.0f64).prop_map(AdditionStrategy::ErdosRenyiRewrite),
    ]
}

fn fk_inputs() -> impl Strategy<Value = (usize, usize, f64, AdversaryPlan, u64)> {
    (2usize..24)
        .prop_flat_map(|n| (Just(n), 1..=n))
        .prop_flat_map(|(n, k)| {
            (
                Just(n),
                Just(k),
                0.0..=1.0f64,
                deletion(),
                addition(n - k),
                any::<u64>(),
            )
        })
        .prop_map(|(n, k, p, d, a, seed)| (n, k, p, AdversaryPlan::new(d, a), seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn phases_touch_only_their_region((n, k, p, plan, seed) in fk_inputs()) {
        let ph = sample_fk_phases(n, k, p, plan, seed).unwrap();
        let planted: BTreeSet<usize> = ph.instance.planted.iter().copied().collect();
        prop_assert_eq!(planted.len(), k);
        prop_assert!(ph.instance.graph.is_clique(&ph.instance.planted));

        let before = edge_set(&ph.random);
        let mid = edge_set(&ph.after_deletion);
        let after = edge_set(&ph.instance.graph);
        // Deletion only removes cut edges.
        prop_assert!(mid.is_subset(&before));
        for &(u, v) in before.difference(&mid) {
            prop_assert!(planted.contains(&u) != planted.contains(&v));
        }
        // Addition only rewrites pairs outside the planted set.
        for &(u, v) in mid.symmetric_difference(&after) {
            prop_assert!(!planted.contains(&u) && !planted.contains(&v));
        }
    }

    #[test]
    fn samplers_are_pure((n, k, p, plan, seed) in fk_inputs()) {
        prop_assert_eq!(
            sample_fk(n, k, p, plan, seed).unwrap(),
            sample_fk(n, k, p, plan, seed).unwrap()
        );
        let a = sample_er_bipartite(k, n, p, seed).unwrap();
        let b = sample_er_bipartite(k, n, p, seed).unwrap();
        prop_assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn cut_graph_matches_adjacency(n in 1usize..16, seed in any::<u64>(), mask in any::<u16>()) {
        let g = sample_fk(n, 1, 0.5, AdversaryPlan::default(), seed).unwrap().graph;
        let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let rest: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 0).collect();
        let h = cut_graph(&g, &s).unwrap();
        for (a, &u) in s.iter().enumerate() {
            for (b, &v) in rest.iter().enumerate() {
                prop_assert_eq!(h.has_edge(a, b), g.has_edge(u, v));
            }
        }
    }
}

#[test]
fn complement_clique_gives_a_second_clique() {
    let plan = AdversaryPlan::new(
        DeletionStrategy::None,
        AdditionStrategy::FullCliqueOnComplementSubset(14),
    );
    let inst = sample_fk(30, 14, 0.5, plan, 5).unwrap();
    let cliques = enumerate_k_cliques(&inst.graph, 14, 1000).unwrap();
    assert!(cliques.len() >= 2, "found {}", cliques.len());
    assert!(cliques.contains(&inst.planted));
}

#[test]
fn five_cycle_cut() {
    let g = Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
    let h = cut_graph(&g, &[0, 1]).unwrap();
    // Right side is {2, 3, 4}: vertex 0 meets 4, vertex 1 meets 2.
    assert_eq!(h.edges(), &[(0, 2), (1, 0)]);
}

#[test]
fn er_bipartite_edge_count_moments() {
    let seeds = 400;
    let total: f64 = (0..seeds)
        .map(|s| sample_er_bipartite(64, 1024, 0.5, s).unwrap().edge_count() as f64)
        .sum();
    let mean = total / seeds as f64;
    let sd = (65536.0f64 * 0.25).sqrt();
    assert!((mean - 32768.0).abs() <= 3.0 * sd, "mean {mean}");
}

/// Edge classes of the planted-biclique model against their probabilities.
#[test]
fn planted_biclique_edge_frequencies() {
    let (k, n, l, p) = (4, 6, 2, 0.5);
    let reduced = 0.25;
    // [inside S×P, S×¬P, rest]: (edges, pairs)
    let mut counts = [(0u64, 0u64); 3];
    for seed in 0..100_000u64 {
        let draw = sample_planted_biclique(k, n, l, p, seed).unwrap();
        let left: BTreeSet<usize> = draw.left_set.iter().copied().collect();
        let right: BTreeSet<usize> = draw.right_set.iter().copied().collect();
        for u in 0..k {
            for v in 0..n {
                let class = match (left.contains(&u), right.contains(&v)) {
                    (true, true) => 0,
                    (true, false) => 1,
                    _ => 2,
                };
                counts[class].1 += 1;
                counts[class].0 += draw.graph.has_edge(u, v) as u64;
            }
        }
    }
    for (class, prob) in [(0, 1.0), (1, reduced), (2, p)] {
        let (hits, pairs) = counts[class];
        let freq = hits as f64 / pairs as f64;
        let sd = (prob * (1.0 - prob) / pairs as f64).sqrt();
        assert!(
            (freq - prob).abs() <= 3.0 * sd + 1e-12,
            "class {class}: {freq} vs {prob}"
        );
    }
}
