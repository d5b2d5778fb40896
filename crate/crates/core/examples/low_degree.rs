//! Low-degree norm of the planted-biclique likelihood ratio, exact and by shape,
//! with a Monte-Carlo check of one character moment.
//!
//! `cargo run --release --example low_degree -- [k] [n] [l] [degree]`

use semirandom_clique::lowdeg::{chi_moment, lr_norm_squared, monte_carlo_moment, trend_k};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().ok());
    let k = args.next().flatten().unwrap_or(4);
    let n = args.next().flatten().unwrap_or(6);
    let l = args.next().flatten().unwrap_or(2);
    let degree = args.next().flatten().unwrap_or(2);
    let p = 0.5;

    let report = lr_norm_squared(k, n, l, p, degree).expect("parameters within budget");
    match &report.norm_sq_minus_one_exact {
        Some(exact) => println!("||LR<=D||^2 - 1 = {exact} (exact)"),
        None => println!("||LR<=D||^2 - 1 ~ {:.6e}", report.norm_sq_minus_one),
    }
    print!("{}", report.to_csv());

    // A 4-cycle: two left vertices joined to the same two right vertices.
    let alpha = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let exact = chi_moment(2, &[2, 2], k, n, l, p).expect("valid shape");
    let mc = monte_carlo_moment(&alpha, k, n, l, p, 200_000, 5).expect("valid shape");
    println!(
        "4-cycle moment: exact {exact:.5}, sampled {:.5} +- {:.5}",
        mc.estimate, mc.stderr
    );

    // Degree-4 norm along k = n^(0.6) with half the clique on the left.
    for n in [16, 64, 256, 1024] {
        let k = trend_k(n, 0.1);
        let r = lr_norm_squared(k, n, k / 2, p, 4).expect("parameters within budget");
        println!(
            "n={n:>5} k={k:>3}: ||LR<=4||^2 - 1 = {:.4e}",
            r.norm_sq_minus_one
        );
    }
}
