//! Small semidefinite programs solved with the ADMM solver: the smallest
//! eigenvalue of a matrix as a trace-one SDP and a max-cut relaxation.
//!
//! `cargo run --release --example sdp_solver`

use nalgebra::DMatrix;
use semirandom_clique::sdp::{min_eigenvalue, solve, SdpProblem, SolveOptions};

fn main() {
    // min <C, X> subject to tr X = 1, X PSD equals λ_min(C).
    let c = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
    let mut prob = SdpProblem::dense(3);
    prob.add_entry_constraint(&[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)], 1.0);
    prob.set_matrix_objective(&c);
    let sol = solve(&prob, &SolveOptions::default());
    println!(
        "trace-one SDP: {:.8} ({:?}, {} iterations), lambda_min = {:.8}",
        sol.objective_value,
        sol.status,
        sol.iterations,
        min_eigenvalue(&c)
    );

    // Max-cut relaxation of the 5-cycle: max Σ (1 − X_ij)/2 over edges, diag X = 1.
    let n = 5;
    let mut laplacian = DMatrix::zeros(n, n);
    for i in 0..n {
        let j = (i + 1) % n;
        laplacian[(i, j)] = 0.25;
        laplacian[(j, i)] = 0.25;
    }
    let mut cut = SdpProblem::dense(n);
    for i in 0..n {
        cut.add_entry_constraint(&[(i, i, 1.0)], 1.0);
    }
    cut.set_matrix_objective(&laplacian);
    let sol = solve(&cut, &SolveOptions::default());
    let value = n as f64 / 2.0 - sol.objective_value;
    let expected = 25.0 / 8.0 + 25.0 * 5f64.sqrt() / 40.0;
    println!("5-cycle max-cut relaxation: {value:.6} (closed form {expected:.6})");
}
