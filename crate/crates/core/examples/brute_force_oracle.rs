//! Exact and quasi-polynomial clique listing on a small semi-random instance.
//!
//! `cargo run --release --example brute_force_oracle -- [seed]`

use semirandom_clique::graphs::{sample_fk, AdditionStrategy, AdversaryPlan, DeletionStrategy};
use semirandom_clique::oracle::{enumerate_k_cliques, exact_good_clique_list, quasi_brute_force};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3u64);
    let (n, k) = (30, 12);
    let plan = AdversaryPlan::new(
        DeletionStrategy::DeleteAllCut,
        AdditionStrategy::DisjointPlantedCopies(1),
    );
    let inst = sample_fk(n, k, 0.5, plan, seed).expect("valid parameters");
    println!("planted {:?}", inst.planted);

    let all = enumerate_k_cliques(&inst.graph, k, 10_000).expect("few cliques");
    println!("{} cliques of size {k}", all.len());

    let good = exact_good_clique_list(&inst.graph, k, k / 2).expect("small instance");
    println!(
        "{} of them have no large biclique across their cut",
        good.len()
    );

    let c = 3.5 / (n as f64).log2();
    let list = quasi_brute_force(&inst.graph, k, c).expect("valid seed constant");
    println!("quasi brute force list ({} sets):", list.len());
    for set in &list {
        let mark = if *set == inst.planted {
            " <- planted"
        } else {
            ""
        };
        println!("  {set:?}{mark}");
    }
}
