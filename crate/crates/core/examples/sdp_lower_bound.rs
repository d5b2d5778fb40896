//! The explicit degree-2 SDP solution on a random bipartite graph: constraint
//! residuals, entry range and smallest eigenvalue, for both bottom blocks.
//!
//! Usage: `sdp_lower_bound [k] [n] [l] [seed] [solver-iterations]`

use std::time::Instant;

use semirandom_clique::certify::{
    sdp_biclique_feasibility, sdp_lb_construction_with, BottomBlock, FeasibilityOptions,
    SdpFeasibility,
};
use semirandom_clique::graphs::sample_er_bipartite;
use semirandom_clique::sdp::SolveOptions;

fn main() {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|s| s.parse().ok())
        .collect();
    let arg = |i: usize, default: usize| args.get(i).copied().unwrap_or(default);
    let (k, n, l, seed, iters) = (
        arg(0, 32),
        arg(1, 256),
        arg(2, 1),
        arg(3, 0) as u64,
        arg(4, 0),
    );
    let h = sample_er_bipartite(k, n, 0.5, seed).expect("valid parameters");
    for bottom in [BottomBlock::Literal, BottomBlock::Shifted] {
        let start = Instant::now();
        let (_, rep) = sdp_lb_construction_with(&h, k, l, bottom).expect("graph has edges");
        println!(
            "{bottom:?}: linear residual {:.2e}, entries in [{:.3e}, {:.3e}], min eigenvalue {:.3e} ({:.1}s)",
            rep.linear_residual(),
            rep.min_entry,
            rep.max_entry,
            rep.min_eigenvalue,
            start.elapsed().as_secs_f64()
        );
    }
    if iters > 0 {
        let (warm, _) =
            sdp_lb_construction_with(&h, k, l, BottomBlock::Shifted).expect("graph has edges");
        let opts = FeasibilityOptions {
            solve: SolveOptions {
                max_iter: iters,
                ..FeasibilityOptions::default().solve
            },
            warm_start: Some(warm),
        };
        let start = Instant::now();
        let outcome = sdp_biclique_feasibility(&h, k, l, &opts).expect("valid parameters");
        let detail = match &outcome {
            SdpFeasibility::Unknown(d) => format!("{d:?}"),
            SdpFeasibility::Infeasible(r) => r.clone(),
            SdpFeasibility::Feasible(_) => String::new(),
        };
        println!(
            "solver: {} {detail} ({:.1}s)",
            outcome.label(),
            start.elapsed().as_secs_f64()
        );
    }
}
