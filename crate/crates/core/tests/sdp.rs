//! Solver checks on problems with closed-form optima, plus cone-projection and
//! eigenvalue properties on random matrices.

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semirandom_clique::certify::spectral_norm;
use semirandom_clique::sdp::{
    min_eigenvalue, project_psd, solve, Objective, SdpProblem, SolveOptions, SolveStatus,
};

const OBJECTIVE_TOL: f64 = 1e-5;

fn tight() -> SolveOptions {
    SolveOptions {
        tol_primal: 1e-9,
        tol_dual: 1e-9,
        max_iter: 50_000,
        ..SolveOptions::default()
    }
}

fn assert_optimum(problem: &SdpProblem, expected: f64) {
    let sol = solve(problem, &tight());
    assert_eq!(sol.status, SolveStatus::Converged, "{sol:?}");
    assert!(
        (sol.objective_value - expected).abs() <= OBJECTIVE_TOL,
        "objective {} expected {expected}",
        sol.objective_value
    );
}

/// min ⟨C, X⟩ with tr X = 1 is the smallest eigenvalue of C.
#[test]
fn trace_one_gives_smallest_eigenvalue() {
    let c = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
    let mut prob = SdpProblem::dense(3);
    prob.add_entry_constraint(&[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)], 1.0);
    prob.set_matrix_objective(&c);
    assert_optimum(&prob, 2.0 - 2f64.sqrt());
}

/// Max-cut relaxation of the 5-cycle: value (25 + 5√5)/8.
#[test]
fn five_cycle_max_cut() {
    let mut c = DMatrix::zeros(5, 5);
    for i in 0..5 {
        let j = (i + 1) % 5;
        c[(i, j)] = 0.25;
        c[(j, i)] = 0.25;
    }
    let mut prob = SdpProblem::dense(5);
    for i in 0..5 {
        prob.add_entry_constraint(&[(i, i, 1.0)], 1.0);
    }
    prob.set_matrix_objective(&c);
    // cut = 5/2 − ⟨C, X⟩
    assert_optimum(&prob, 2.5 - (25.0 + 5.0 * 5f64.sqrt()) / 8.0);
}

/// Lovász theta of the 5-cycle: max ⟨J, X⟩ with tr X = 1 and X_ij = 0 on edges is √5.
#[test]
fn five_cycle_theta() {
    let mut prob = SdpProblem::dense(5);
    prob.add_entry_constraint(&(0..5).map(|i| (i, i, 1.0)).collect::<Vec<_>>(), 1.0);
    for i in 0..5 {
        prob.fix_zero_entry(i, (i + 1) % 5);
    }
    prob.set_matrix_objective(&(-DMatrix::from_element(5, 5, 1.0)));
    assert_optimum(&prob, -(5f64.sqrt()));
}

/// Upper box on an off-diagonal entry binds before the PSD limit.
#[test]
fn box_bound_binds() {
    let mut prob = SdpProblem::dense(2);
    prob.add_entry_constraint(&[(0, 0, 1.0)], 1.0);
    prob.add_entry_constraint(&[(1, 1, 1.0)], 1.0);
    let v = prob.var_of(0, 1).unwrap();
    prob.set_bounds(v, -1.0, 0.5);
    prob.set_objective(Objective::Linear(vec![(v, -1.0)]));
    assert_optimum(&prob, -0.5);
}

/// min X₁₁² + X₂₂² with X₁₁ + X₂₂ = 1 splits the trace evenly.
#[test]
fn squared_norm_splits_trace() {
    let mut prob = SdpProblem::dense(2);
    prob.add_entry_constraint(&[(0, 0, 1.0), (1, 1, 1.0)], 1.0);
    let a = prob.var_of(0, 0).unwrap();
    let b = prob.var_of(1, 1).unwrap();
    prob.set_objective(Objective::SquaredNorm(vec![vec![(a, 1.0)], vec![(b, 1.0)]]));
    assert_optimum(&prob, 0.5);
}

fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

#[test]
fn spectral_norm_matches_svd() {
    for (rows, cols, seed) in [
        (1, 1, 0),
        (5, 3, 1),
        (12, 200, 2),
        (64, 64, 3),
        (256, 2048, 4),
    ] {
        let m = random_matrix(rows, cols, seed);
        let svd = m.clone().svd(false, false).singular_values.max();
        let ours = spectral_norm(&m);
        assert!(
            (ours - svd).abs() <= 1e-8 * svd,
            "{rows}x{cols}: {ours} vs {svd}"
        );
    }
}

#[test]
fn wishart_is_psd() {
    for seed in 0..5 {
        let a = random_matrix(40, 25, seed);
        assert!(min_eigenvalue(&(&a * a.transpose())) >= -1e-12);
    }
}

fn symmetric(n: usize, seed: u64) -> DMatrix<f64> {
    let a = random_matrix(n, n, seed);
    (&a + a.transpose()) * 0.5
}

proptest! {
    #[test]
    fn projection_is_idempotent_and_nonexpansive(n in 1usize..12, s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = symmetric(n, s1);
        let b = symmetric(n, s2);
        let pa = project_psd(&a);
        let pb = project_psd(&b);
        prop_assert!(min_eigenvalue(&pa) >= -1e-10);
        prop_assert!((project_psd(&pa) - &pa).norm() <= 1e-9);
        prop_assert!((&pa - &pb).norm() <= (&a - &b).norm() + 1e-9);
    }

    #[test]
    fn projection_with_zero_rows(n in 2usize..10, seed in any::<u64>(), mask in any::<u16>()) {
        let mut a = symmetric(n, seed);
        for i in (0..n).filter(|i| mask >> i & 1 == 1) {
            a.row_mut(i).fill(0.0);
            a.column_mut(i).fill(0.0);
        }
        let p = project_psd(&a);
        for i in (0..n).filter(|i| mask >> i & 1 == 1) {
            prop_assert!(p.row(i).iter().all(|&v| v == 0.0));
        }
        prop_assert!(min_eigenvalue(&p) >= -1e-10);
    }
}
