//! Truncated likelihood-ratio norms for the planted-biclique problem.
//!
//! Under the planted distribution each left vertex joins `S` with probability
//! `ℓ/k`, each right vertex joins `T` with probability `β = (k−ℓ)/n`; edges in
//! `S × T` are present, edges in `S × ¬T` are present with the reduced
//! probability that keeps the marginal at `p`, and all other edges with
//! probability `p`. Characters are `a = √((1−p)/p)` on an edge and `−1/a` off
//! it, which is the ±1 convention at `p = ½`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::reduced_edge_probability;
use crate::rng::{streams, substream};

/// Largest supported truncation degree.
pub const MAX_DEGREE: usize = 12;
/// Exact arithmetic is used when `k, n ≤ EXACT_SIZE_LIMIT` and `D ≤ EXACT_DEGREE_LIMIT`.
pub const EXACT_SIZE_LIMIT: usize = 10_000;
pub const EXACT_DEGREE_LIMIT: usize = 8;

#[derive(Debug, Error)]
pub enum LowDegError {
    #[error("inadmissible parameters: {0}")]
    InvalidParameter(String),
    #[error("degree {0} exceeds the enumeration budget {MAX_DEGREE}")]
    Budget(usize),
}

fn check_params(k: usize, n: usize, l: usize, p: f64) -> Result<(), LowDegError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(LowDegError::InvalidParameter(format!(
            "p = {p} not in (0, 1)"
        )));
    }
    if k == 0 || n == 0 {
        return Err(LowDegError::InvalidParameter(
            "k and n must be positive".into(),
        ));
    }
    if l > k {
        return Err(LowDegError::InvalidParameter(format!(
            "l = {l} exceeds k = {k}"
        )));
    }
    // With l = 0 the set S is empty, so the reduced probability never applies.
    if l == 0 {
        return Ok(());
    }
    reduced_edge_probability(k, n, l, p)
        .map(|_| ())
        .map_err(|e| LowDegError::InvalidParameter(e.to_string()))
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

fn ratio(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn binom_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Per-right-vertex factor `g(d) = β + (1−β)(−β/(1−β))^d`, exact.
fn right_factor(beta: &BigRational, d: usize) -> BigRational {
    let one = BigRational::one();
    let rest = &one - beta;
    let mut off = (-beta.clone()) / &rest;
    off = num_traits::pow(off, d);
    beta + rest * off
}

/// `E_planted[χ_α]` for a shape with `L` left vertices and the given right degrees.
pub fn chi_moment(
    l_count: usize,
    degrees: &[usize],
    k: usize,
    n: usize,
    l: usize,
    p: f64,
) -> Result<f64, LowDegError> {
    check_params(k, n, l, p)?;
    if l_count == 0 || degrees.iter().any(|&d| d == 0) {
        return Err(LowDegError::InvalidParameter(
            "need L ≥ 1 and every degree ≥ 1".into(),
        ));
    }
    if degrees.contains(&1) || l == 0 {
        return Ok(0.0);
    }
    let beta = ratio(k - l, n);
    let a = ((1.0 - p) / p).sqrt();
    let mut value = (l as f64 / k as f64).powi(l_count as i32);
    for &d in degrees {
        value *= a.powi(d as i32) * right_factor(&beta, d).to_f64().unwrap_or(f64::NAN);
    }
    Ok(value)
}

/// `E_planted[χ_α]²`, exact for the binary value of `p`.
pub fn chi_moment_squared_exact(
    l_count: usize,
    degrees: &[usize],
    k: usize,
    n: usize,
    l: usize,
    p: f64,
) -> Result<BigRational, LowDegError> {
    check_params(k, n, l, p)?;
    if degrees.contains(&1) || l == 0 {
        return Ok(BigRational::zero());
    }
    let p = rational(p);
    let a_sq = (BigRational::one() - &p) / &p;
    let beta = ratio(k - l, n);
    let total: usize = degrees.iter().sum();
    let mut value = num_traits::pow(ratio(l, k), 2 * l_count) * num_traits::pow(a_sq, total);
    for &d in degrees {
        let g = right_factor(&beta, d);
        value *= &g * &g;
    }
    Ok(value)
}

/// Labeled bipartite graphs on `L × R` with the given right degrees and every
/// left degree at least one, by inclusion–exclusion over uncovered left vertices.
pub fn count_bipartite_shapes(l_count: usize, r_count: usize, degrees: &[usize]) -> BigInt {
    assert_eq!(degrees.len(), r_count, "one degree per right vertex");
    let mut total = BigInt::zero();
    for j in 0..=l_count {
        let mut term = binom_big(l_count, j);
        for &d in degrees {
            term *= binom_big(l_count - j, d);
        }
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Number of ways to assign a degree multiset to labeled right vertices.
fn arrangements(degrees: &[usize]) -> BigInt {
    let mut result = factorial(degrees.len());
    let mut i = 0;
    while i < degrees.len() {
        let j = degrees[i..]
            .iter()
            .take_while(|&&d| d == degrees[i])
            .count();
        result /= factorial(j);
        i += j;
    }
    result
}

/// Non-increasing sequences of `parts` values in `[1, max_part]` summing to at most `budget`.
fn degree_sequences(parts: usize, max_part: usize, budget: usize) -> Vec<Vec<usize>> {
    fn rec(
        parts: usize,
        cap: usize,
        budget: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if parts == 0 {
            out.push(cur.clone());
            return;
        }
        for d in (1..=cap.min(budget.saturating_sub(parts - 1))).rev() {
            cur.push(d);
            rec(parts - 1, d, budget - d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(parts, max_part, budget, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeTerm {
    #[serde(rename = "L")]
    pub l_count: usize,
    #[serde(rename = "R")]
    pub r_count: usize,
    /// Right degrees, non-increasing.
    pub degrees: Vec<usize>,
    /// Edge subsets realizing the shape over all vertex placements.
    pub count: f64,
    pub count_exact: String,
    pub moment: f64,
    pub contribution: f64,
    pub contribution_exact: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowDegReport {
    pub k: usize,
    pub n: usize,
    pub l: usize,
    pub p: f64,
    #[serde(rename = "D")]
    pub degree: usize,
    pub exact: bool,
    pub terms: Vec<ShapeTerm>,
    pub norm_sq_minus_one: f64,
    pub norm_sq_minus_one_exact: Option<String>,
    /// Accumulated rounding bound when floating point is used.
    pub error_bound: f64,
}

impl LowDegReport {
    pub fn exact_value(&self) -> Option<BigRational> {
        self.norm_sq_minus_one_exact
            .as_ref()
            .and_then(|s| s.parse().ok())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("L,R,degrees,count,moment,contribution\n");
        for t in &self.terms {
            let degrees: Vec<String> = t.degrees.iter().map(|d| d.to_string()).collect();
            out.push_str(&format!(
                "{},{},{},{},{:e},{:e}\n",
                t.l_count,
                t.r_count,
                degrees.join(";"),
                t.count_exact,
                t.moment,
                t.contribution
            ));
        }
        out
    }
}

/// `‖LR^{≤D}‖² − 1 = Σ_{0<|α|≤D} E_planted[χ_α]²`, aggregated by shape.
pub fn lr_norm_squared(
    k: usize,
    n: usize,
    l: usize,
    p: f64,
    degree: usize,
) -> Result<LowDegReport, LowDegError> {
    check_params(k, n, l, p)?;
    if degree > MAX_DEGREE {
        return Err(LowDegError::Budget(degree));
    }
    let exact = k <= EXACT_SIZE_LIMIT && n <= EXACT_SIZE_LIMIT && degree <= EXACT_DEGREE_LIMIT;
    let shapes: Vec<(usize, Vec<usize>)> = (1..=degree.min(k))
        .flat_map(|lc| {
            (1..=degree.min(n))
                .flat_map(move |rc| degree_sequences(rc, lc, degree))
                .filter(move |ds| ds.iter().sum::<usize>() >= lc)
                .map(move |ds| (lc, ds))
        })
        .collect();
    let terms: Vec<(ShapeTerm, Option<BigRational>)> = shapes
        .into_par_iter()
        .filter_map(|(lc, ds)| {
            let bip = count_bipartite_shapes(lc, ds.len(), &ds);
            if bip.is_zero() {
                return None;
            }
            let count = bip * arrangements(&ds) * binom_big(k, lc) * binom_big(n, ds.len());
            let moment = chi_moment(lc, &ds, k, n, l, p).expect("parameters checked");
            let count_f = count.to_f64().unwrap_or(f64::INFINITY);
            let (contribution, exact_value) = if exact {
                let sq = chi_moment_squared_exact(lc, &ds, k, n, l, p).expect("parameters checked");
                let c = BigRational::from_integer(count.clone()) * sq;
                (c.to_f64().unwrap_or(f64::INFINITY), Some(c))
            } else {
                (count_f * moment * moment, None)
            };
            Some((
                ShapeTerm {
                    l_count: lc,
                    r_count: ds.len(),
                    degrees: ds,
                    count: count_f,
                    count_exact: count.to_string(),
                    moment,
                    contribution,
                    contribution_exact: exact_value.as_ref().map(|v| v.to_string()),
                },
                exact_value,
            ))
        })
        .collect();
    let (norm, norm_exact, error_bound) = if exact {
        let total = terms
            .iter()
            .filter_map(|(_, v)| v.as_ref())
            .fold(BigRational::zero(), |acc, v| acc + v);
        (
            total.to_f64().unwrap_or(f64::INFINITY),
            Some(total.to_string()),
            0.0,
        )
    } else {
        let total: f64 = terms.iter().map(|(t, _)| t.contribution).sum();
        let ops = (4 * degree + 8) as f64;
        let bound =
            terms.iter().map(|(t, _)| t.contribution.abs()).sum::<f64>() * ops * f64::EPSILON;
        (total, None, bound)
    };
    let terms = terms.into_iter().map(|(t, _)| t).collect();
    Ok(LowDegReport {
        k,
        n,
        l,
        p,
        degree,
        exact,
        terms,
        norm_sq_minus_one: norm,
        norm_sq_minus_one_exact: norm_exact,
        error_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Averages `χ_α` over draws from the planted distribution; `alpha` lists
/// distinct `(left, right)` pairs with `left < k` and `right < n`.
pub fn monte_carlo_moment(
    alpha: &[(usize, usize)],
    k: usize,
    n: usize,
    l: usize,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate, LowDegError> {
    check_params(k, n, l, p)?;
    if samples == 0 {
        return Err(LowDegError::InvalidParameter(
            "samples must be at least 1".into(),
        ));
    }
    if alpha.iter().any(|&(u, v)| u >= k || v >= n) {
        return Err(LowDegError::InvalidParameter(
            "edge endpoint out of range".into(),
        ));
    }
    let q = if l == 0 {
        p
    } else {
        reduced_edge_probability(k, n, l, p).expect("checked")
    };
    let a = ((1.0 - p) / p).sqrt();
    let mut lefts: Vec<usize> = alpha.iter().map(|e| e.0).collect();
    let mut rights: Vec<usize> = alpha.iter().map(|e| e.1).collect();
    lefts.sort_unstable();
    lefts.dedup();
    rights.sort_unstable();
    rights.dedup();
    let (left_prob, right_prob) = (l as f64 / k as f64, (k - l) as f64 / n as f64);
    let mut rng = substream(seed, streams::MONTE_CARLO);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let in_s: Vec<bool> = lefts.iter().map(|_| rng.random_bool(left_prob)).collect();
        let in_t: Vec<bool> = rights.iter().map(|_| rng.random_bool(right_prob)).collect();
        let mut chi = 1.0;
        for &(u, v) in alpha {
            let su = in_s[lefts.binary_search(&u).expect("collected")];
            let tv = in_t[rights.binary_search(&v).expect("collected")];
            let prob = match (su, tv) {
                (true, true) => 1.0,
                (true, false) => q,
                _ => p,
            };
            chi *= if rng.random_bool(prob) { a } else { -1.0 / a };
        }
        sum += chi;
        sum_sq += chi * chi;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0);
    Ok(MonteCarloEstimate {
        estimate: mean,
        stderr: (var / m).sqrt(),
    })
}

/// Smallest `k` with `k ≥ n^{1/2+ε}`.
pub fn trend_k(n: usize, eps: f64) -> usize {
    (n as f64).powf(0.5 + eps).ceil() as usize
}
