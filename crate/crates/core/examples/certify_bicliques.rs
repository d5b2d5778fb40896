//! Runs the spectral, geometric and degree-2 SDP biclique certificates on a
//! random bipartite graph and compares them with the exact largest biclique.
//! A second, smaller graph shows the spectral and geometric bounds applying.
//!
//! `cargo run --release --example certify_bicliques -- [k] [right] [seed]`

use semirandom_clique::certify::{
    balancedness, geometric_bound, sdp_certificate, spectral_bound, BicliqueCertificate,
};
use semirandom_clique::graphs::{sample_er_bipartite, BipartiteGraph};
use semirandom_clique::oracle::max_biclique_witness;
use semirandom_clique::sdp::SolveOptions;

fn show(name: &str, cert: &BicliqueCertificate) {
    match (cert.applicable, cert.certified_bound) {
        (true, Some(s)) => println!("{name:>10}: no biclique with {s} or more left vertices"),
        _ => println!("{name:>10}: inapplicable"),
    }
}

fn report(h: &BipartiteGraph, k: usize, p: f64) {
    let bal = balancedness(h, 2, Some(p)).expect("r fits the left side");
    println!("balancedness: {bal:?}");
    let spectral = spectral_bound(h, k, p).expect("valid density");
    println!("sigma_max = {:.3}", spectral.spectral_norm.unwrap_or(0.0));
    show("spectral", &spectral);
    show(
        "geometric",
        &geometric_bound(h, k, p, 1).expect("valid parameters"),
    );
    show(
        "sdp",
        &sdp_certificate(h, k, &SolveOptions::default()).expect("valid parameters"),
    );
    match max_biclique_witness(h, k).expect("left side within the oracle limit") {
        Some(w) => println!(
            "     exact: largest biclique has {} left and {} right vertices",
            w.left.len(),
            w.right.len()
        ),
        None => println!("     exact: no biclique with a left vertex"),
    }
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: f64| args.get(i).and_then(|a| a.parse().ok()).unwrap_or(default);
    let k = arg(0, 10.0) as usize;
    let right = arg(1, 60.0) as usize;
    let seed = arg(2, 1.0) as u64;
    let p = 0.5;

    println!("random bipartite graph, {k} x {right} at density 1/2");
    let h = sample_er_bipartite(k, right, p, seed).expect("valid parameters");
    report(&h, k, p);

    // Few right vertices at a low density: here both certificates apply.
    let small = sample_er_bipartite(8, 5, 0.3, 0).expect("valid parameters");
    println!("\nrandom bipartite graph, 8 x 5 at density 0.3");
    report(&small, 8, 0.3);
}
