//! Brute-force oracle properties and small worked examples.

use proptest::prelude::*;
use semirandom_clique::graphs::{
    sample_er_bipartite, sample_er_graph, sample_fk, AdversaryPlan, BipartiteGraph, Graph,
};
use semirandom_clique::oracle::{
    enumerate_k_cliques, exact_good_clique_list, max_biclique_left, quasi_brute_force, seed_size,
    sorted_intersection,
};

fn add_edge(h: &BipartiteGraph, u: usize, v: usize) -> BipartiteGraph {
    let mut edges = h.edges().to_vec();
    edges.push((u, v));
    edges.sort_unstable();
    edges.dedup();
    BipartiteGraph::new(h.left_size(), h.right_size(), edges).unwrap()
}

proptest! {
    #[test]
    fn max_biclique_monotone_under_edge_addition(
        k in 1usize..8, m in 1usize..10, p in 0.0..1.0f64, seed in any::<u64>(),
        u in any::<prop::sample::Index>(), v in any::<prop::sample::Index>(),
    ) {
        let h = sample_er_bipartite(k, m, p, seed).unwrap();
        let bigger = add_edge(&h, u.index(k), v.index(m));
        prop_assert!(max_biclique_left(&bigger, k).unwrap() >= max_biclique_left(&h, k).unwrap());
    }

    #[test]
    fn quasi_brute_force_lists_separated_cliques(
        n in 4usize..18, p in 0.3..0.9f64, k in 3usize..7, seed in any::<u64>(), c in 0.5..1.5f64,
    ) {
        let g = sample_er_graph(n, p, seed).unwrap();
        let s = seed_size(n, c);
        let list = quasi_brute_force(&g, k, c).unwrap();
        for (a, set) in list.iter().enumerate() {
            prop_assert_eq!(set.len(), k);
            prop_assert!(g.is_clique(set));
            for other in &list[a + 1..] {
                prop_assert!(sorted_intersection(set, other) <= s);
            }
        }
    }

    #[test]
    fn good_cliques_are_cliques(n in 4usize..14, p in 0.3..0.9f64, k in 2usize..6, l in 0usize..6, seed in any::<u64>()) {
        let g = sample_er_graph(n, p, seed).unwrap();
        let all = enumerate_k_cliques(&g, k, 100_000).unwrap();
        for set in exact_good_clique_list(&g, k, l).unwrap() {
            prop_assert!(g.is_clique(&set));
            prop_assert!(all.contains(&set));
        }
    }
}

#[test]
fn isolated_clique_with_seed_size_two() {
    let clique: Vec<usize> = (0..14).collect();
    let edges = (0..14).flat_map(|u| (u + 1..14).map(move |v| (u, v)));
    let g = Graph::new(30, edges).unwrap();
    let c = 2.0 / 30f64.log2();
    assert_eq!(seed_size(30, c), 2);
    assert_eq!(quasi_brute_force(&g, 14, c).unwrap(), vec![clique]);
}

#[test]
fn no_clique_gives_empty_list() {
    let g = Graph::new(8, (0..7).map(|u| (u, u + 1))).unwrap();
    assert!(quasi_brute_force(&g, 3, 1.0).unwrap().is_empty());
}

#[test]
fn two_disjoint_cliques_are_both_good() {
    let k = 5;
    let edges = (0..2)
        .flat_map(|b| (0..k).flat_map(move |u| (u + 1..k).map(move |v| (b * k + u, b * k + v))));
    let g = Graph::new(2 * k, edges).unwrap();
    let good = exact_good_clique_list(&g, k, 1).unwrap();
    assert_eq!(good, vec![(0..k).collect::<Vec<_>>(), (k..2 * k).collect()]);
}

/// With no adversary, the planted clique is recovered from random seeds.
#[test]
fn quasi_brute_force_finds_planted_clique() {
    let c = 3.5 / 30f64.log2();
    let hits = (0..20u64)
        .filter(|&seed| {
            let inst = sample_fk(30, 14, 0.5, AdversaryPlan::default(), 400 + seed).unwrap();
            quasi_brute_force(&inst.graph, 14, c)
                .unwrap()
                .contains(&inst.planted)
        })
        .count();
    assert!(hits >= 19, "{hits}/20");
}

/// Good-clique list length stays within `(1 + δ)n/k` when `k > 2√(nℓ/δ)`.
#[test]
fn good_clique_count_bound() {
    let (n, k, l, delta) = (30usize, 14usize, 1usize, 0.9f64);
    assert!(k as f64 > 2.0 * (n as f64 * l as f64 / delta).sqrt());
    for seed in 0..10u64 {
        let inst = sample_fk(n, k, 0.5, AdversaryPlan::default(), 500 + seed).unwrap();
        let good = exact_good_clique_list(&inst.graph, k, l).unwrap();
        assert!(good.len() as f64 <= (1.0 + delta) * n as f64 / k as f64);
    }
}
