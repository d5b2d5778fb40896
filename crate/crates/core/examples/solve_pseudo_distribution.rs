//! Solve the degree-4 min-norm pseudo-distribution on a semi-random instance
//! and print the mass it puts on the planted clique.

use std::time::Instant;

use semirandom_clique::graphs::{sample_fk, AdditionStrategy, AdversaryPlan, DeletionStrategy};
use semirandom_clique::sos::{minimize_mean_norm, SosError};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let (n, k) = (30, 14);
    let plan = AdversaryPlan::new(
        DeletionStrategy::DeleteAllCut,
        AdditionStrategy::FullCliqueOnComplementSubset(14),
    );
    let inst = sample_fk(n, k, 0.5, plan, seed).expect("valid parameters");
    let start = Instant::now();
    let dist = match minimize_mean_norm(&inst.graph, k, 4) {
        Ok(d) => d,
        Err(SosError::NotConverged { partial }) => {
            eprintln!("warning: solver hit its iteration cap");
            *partial
        }
        Err(e) => panic!("{e}"),
    };
    let mean = dist.mean_vector();
    let mass: f64 = inst.planted.iter().map(|&i| mean[i]).sum();
    println!(
        "seed {seed}: solved in {:.1}s",
        start.elapsed().as_secs_f64()
    );
    println!(
        "objective ||E[w]||^2 = {:.4}, eta = {:.2e}",
        dist.objective, dist.eta
    );
    println!(
        "mass on planted clique = {:.4} (reference k^2/n = {:.4})",
        mass,
        (k * k) as f64 / n as f64
    );
}
