//! Properties of solved pseudo-distributions: symmetry, Hölder consistency,
//! conditional vectors and monotonicity under edge addition.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semirandom_clique::graphs::{
    sample_fk, AdditionStrategy, AdversaryPlan, DeletionStrategy, Graph,
};
use semirandom_clique::sos::{minimize_mean_norm, vertices_of, Mask, PseudoDistribution, SosError};

fn solve(g: &Graph, k: usize, d: usize) -> PseudoDistribution {
    match minimize_mean_norm(g, k, d) {
        Ok(dist) => dist,
        Err(SosError::NotConverged { partial }) => *partial,
        Err(e) => panic!("{e}"),
    }
}

fn cycle(n: usize) -> Graph {
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

fn two_triangles() -> Graph {
    Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
}

fn relabel(mask: Mask, perm: &[usize]) -> Mask {
    vertices_of(mask)
        .iter()
        .fold(0, |m, &v| m | 1u128 << perm[v])
}

fn assert_invariant(d: &PseudoDistribution, perms: &[Vec<usize>]) {
    let tol = 1e-4 + 10.0 * d.eta;
    for perm in perms {
        for (&mask, &value) in &d.moments {
            let image = d.moment(relabel(mask, perm));
            assert!(
                (image - value).abs() <= tol,
                "moment {mask:b} = {value}, image {image}"
            );
        }
    }
}

#[test]
fn cycle_moments_are_rotation_invariant() {
    let n = 6;
    let d = solve(&cycle(n), 2, 2);
    let rotations: Vec<Vec<usize>> = (1..n)
        .map(|s| (0..n).map(|i| (i + s) % n).collect())
        .collect();
    assert_invariant(&d, &rotations);
    for m in d.mean_vector() {
        assert!((m - 2.0 / n as f64).abs() <= 1e-4 + 10.0 * d.eta);
    }
}

#[test]
fn two_triangle_moments_are_invariant() {
    let d = solve(&two_triangles(), 3, 4);
    let perms = vec![
        vec![3, 4, 5, 0, 1, 2],
        vec![1, 2, 0, 3, 4, 5],
        vec![1, 0, 2, 4, 3, 5],
    ];
    assert_invariant(&d, &perms);
}

fn semi_random(seed: u64) -> (Graph, usize) {
    let plan = AdversaryPlan::new(
        DeletionStrategy::DeleteAllCut,
        AdditionStrategy::FullCliqueOnComplementSubset(5),
    );
    (sample_fk(14, 5, 0.5, plan, seed).unwrap().graph, 5)
}

#[test]
fn solved_moments_are_psd_and_feasible() {
    for seed in 0..3 {
        let (g, k) = semi_random(seed);
        let d = solve(&g, k, 4);
        assert!(d.min_eigenvalue() >= -10.0 * d.eta - 1e-9, "seed {seed}");
        assert!(
            d.constraint_residual(&g) <= 10.0 * d.eta + 1e-9,
            "seed {seed}"
        );
    }
}

#[test]
fn conditional_vectors_keep_cardinality() {
    let (g, k) = semi_random(1);
    let d = solve(&g, k, 4);
    let slack = 10.0 * d.eta + 1e-6;
    for i in 0..g.n() {
        let Ok(c) = d.reweight(&[i], None) else {
            continue;
        };
        // Relative slack: dividing by a small Ẽ[w_i] magnifies the error.
        let scaled = slack / d.moment(1u128 << i);
        let sum: f64 = c.values.iter().sum();
        assert!((sum - k as f64).abs() <= scaled, "vertex {i}: {sum}");
        assert!(c.values.iter().all(|&v| v >= -scaled && v <= 1.0 + scaled));
    }
}

#[test]
fn pseudo_distribution_survives_edge_addition() {
    let (g, k) = semi_random(2);
    let d = solve(&g, k, 4);
    let before = d.constraint_residual(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut edges = g.edges().to_vec();
    for _ in 0..20 {
        let u = rng.random_range(0..g.n());
        let v = rng.random_range(0..g.n());
        if u != v {
            edges.push((u.min(v), u.max(v)));
        }
    }
    let bigger = Graph::new(g.n(), edges).unwrap();
    assert!(bigger.edge_count() > g.edge_count());
    assert!(d.constraint_residual(&bigger) <= before + 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `Ẽ[fg] ≤ √(Ẽ[f²]Ẽ[g²]) + 10η` for affine `f, g`.
    #[test]
    fn holder_for_affine_functions(seed in any::<u64>()) {
        let d = solve(&two_triangles(), 3, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 6;
        let f: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
        // Index 0 is the constant term; w_i² = w_i.
        let entry = |a: usize, b: usize| -> f64 {
            let mask = match (a, b) {
                (0, 0) => 0,
                (0, j) | (j, 0) => 1u128 << (j - 1),
                (i, j) => (1u128 << (i - 1)) | (1u128 << (j - 1)),
            };
            d.moment(mask)
        };
        let pair = |x: &[f64], y: &[f64]| -> f64 {
            (0..=n).flat_map(|a| (0..=n).map(move |b| (a, b))).map(|(a, b)| x[a] * y[b] * entry(a, b)).sum()
        };
        let fg = pair(&f, &g);
        let bound = (pair(&f, &f).max(0.0) * pair(&g, &g).max(0.0)).sqrt();
        prop_assert!(fg <= bound + 10.0 * d.eta + 1e-9);
    }
}
