//! Shape-sum invariants of the low-degree norm, a Monte-Carlo cross-check at a
//! biased density and the growth pattern along `k = n^{1/2+ε}`.

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use semirandom_clique::lowdeg::{
    chi_moment, lr_norm_squared, monte_carlo_moment, trend_k, LowDegReport,
};

fn admissible() -> impl Strategy<Value = (usize, usize, usize, f64)> {
    (
        2usize..9,
        6usize..20,
        prop::sample::select(vec![0.5, 0.6, 0.75]),
    )
        .prop_flat_map(|(k, n, p)| (Just(k), Just(n), 0..=k, Just(p)))
        .prop_filter("reduced probability in [0,1]", |&(k, n, l, p)| {
            let q = (n as f64 * p - (k - l) as f64) / (n as f64 - (k - l) as f64);
            (0.0..=1.0).contains(&q)
        })
}

fn all_degree_two(report: &LowDegReport, r: usize) -> f64 {
    report
        .terms
        .iter()
        .find(|t| t.l_count == 2 && t.r_count == r && t.degrees.iter().all(|&d| d == 2))
        .map(|t| t.contribution)
        .expect("shape present")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_is_the_sum_of_terms((k, n, l, p) in admissible(), degree in 1usize..6) {
        let r = lr_norm_squared(k, n, l, p, degree).unwrap();
        prop_assert!(r.norm_sq_minus_one >= 0.0);
        let exact: BigRational = r
            .terms
            .iter()
            .map(|t| t.contribution_exact.as_ref().unwrap().parse::<BigRational>().unwrap())
            .fold(BigRational::zero(), |a, b| a + b);
        prop_assert_eq!(Some(exact), r.exact_value());
        for t in &r.terms {
            prop_assert!(t.degrees.iter().sum::<usize>() <= degree);
            prop_assert!(t.count >= 0.0);
            if t.degrees.contains(&1) {
                prop_assert_eq!(t.moment, 0.0);
            }
        }
    }

    #[test]
    fn norm_is_monotone_in_degree((k, n, l, p) in admissible(), degree in 1usize..6) {
        let lo = lr_norm_squared(k, n, l, p, degree).unwrap().exact_value().unwrap();
        let hi = lr_norm_squared(k, n, l, p, degree + 1).unwrap().exact_value().unwrap();
        prop_assert!(hi >= lo);
    }
}

#[test]
fn biased_density_matches_monte_carlo() {
    let (k, n, l, p) = (6, 10, 3, 0.9);
    // Two left vertices sharing two right vertices, and a star with a degree-3 centre.
    let shapes: [(&[(usize, usize)], usize, &[usize]); 2] = [
        (&[(0, 0), (1, 0), (0, 1), (1, 1)], 2, &[2, 2]),
        (&[(0, 0), (1, 0), (2, 0)], 3, &[3]),
    ];
    for (alpha, lc, degrees) in shapes {
        let exact = chi_moment(lc, degrees, k, n, l, p).unwrap();
        let mc = monte_carlo_moment(alpha, k, n, l, p, 400_000, 21).unwrap();
        assert!(
            (mc.estimate - exact).abs() <= 3.0 * mc.stderr,
            "{alpha:?}: {} +- {} vs {exact}",
            mc.estimate,
            mc.stderr
        );
    }
}

/// Along `k = ⌈n^{0.7}⌉` with `ℓ = 1`, the all-degree-2 terms with `L = 2`
/// increase with `R` at every `n`, and the `R = 1` term decreases as `n` grows.
#[test]
fn degree_two_terms_follow_the_trend() {
    let mut previous_low = f64::INFINITY;
    for n in [64, 256, 1024, 4096] {
        let k = trend_k(n, 0.2);
        let report = lr_norm_squared(k, n, 1, 0.5, 8).unwrap();
        let terms: Vec<f64> = (1..=4).map(|r| all_degree_two(&report, r)).collect();
        assert!(terms.windows(2).all(|w| w[1] > w[0]), "n={n}: {terms:?}");
        assert!(terms[0] < previous_low, "n={n}");
        previous_low = terms[0];
    }
}
