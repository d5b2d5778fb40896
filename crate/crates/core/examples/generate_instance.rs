//! Samples a semi-random instance phase by phase and prints how many edges each
//! phase leaves, then writes the final graph as an edge list on stdout when asked.
//!
//! `cargo run --example generate_instance -- [seed] [--edges]`

use semirandom_clique::graphs::{
    cut_graph, sample_fk_phases, AdditionStrategy, AdversaryPlan, DeletionStrategy,
};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seed = args.iter().find_map(|a| a.parse().ok()).unwrap_or(7u64);
    let print_edges = args.iter().any(|a| a == "--edges");

    let (n, k, p) = (40, 12, 0.5);
    let plan = AdversaryPlan::new(
        DeletionStrategy::DeleteAllCut,
        AdditionStrategy::DisjointPlantedCopies(1),
    );
    let phases = sample_fk_phases(n, k, p, plan, seed).expect("valid parameters");
    let inst = &phases.instance;
    println!("planted clique {:?}", inst.planted);
    println!("edges after planting  {}", phases.random.edge_count());
    println!(
        "edges after deletion  {}",
        phases.after_deletion.edge_count()
    );
    println!("edges in the instance {}", inst.graph.edge_count());

    let cut = cut_graph(&inst.graph, &inst.planted).expect("planted set is in range");
    println!(
        "cut graph: {} x {} with {} edges, max right degree {}",
        cut.left_size(),
        cut.right_size(),
        cut.edge_count(),
        cut.max_right_degree()
    );
    assert!(inst.graph.is_clique(&inst.planted));

    if print_edges {
        print!("{}", inst.graph.to_edge_list());
    }
}
