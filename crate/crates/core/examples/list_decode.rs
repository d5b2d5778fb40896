//! End-to-end list decoding on semi-random instances: solve, round by votes,
//! repair and prune, then compare with the planted clique.

use semirandom_clique::graphs::{sample_fk, AdditionStrategy, AdversaryPlan, DeletionStrategy};
use semirandom_clique::listdecode::{cleanup, decode, DecodeParams};
use semirandom_clique::sos::{minimize_mean_norm, SosError};

fn main() {
    let seeds: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3);
    let (n, k, p) = (30, 14, 0.5);
    for seed in 0..seeds {
        let plan = AdversaryPlan::new(
            DeletionStrategy::DeleteAllCut,
            AdditionStrategy::FullCliqueOnComplementSubset(14),
        );
        let inst = sample_fk(n, k, p, plan, seed).expect("valid parameters");
        let dist = match minimize_mean_norm(&inst.graph, k, 4) {
            Ok(d) => d,
            Err(SosError::NotConverged { partial }) => *partial,
            Err(e) => panic!("{e}"),
        };
        let params = DecodeParams {
            repetitions: 50,
            ..DecodeParams::with_defaults(n, k, 1)
        };
        let raw = decode(&inst.graph, k, &params, &dist, seed).expect("decoding");
        let mut report = cleanup(&inst.graph, k, p, &raw);
        report.evaluate(&inst.planted);
        let m = report.metrics.as_ref().expect("metrics");
        println!(
            "seed {seed}: {} raw candidates, final list {:?}, planted recovered: {}",
            report.raw_candidates.len(),
            report.final_list,
            m.contains_planted
        );
    }
}
