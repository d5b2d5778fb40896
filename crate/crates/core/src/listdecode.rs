//! Rounding by votes: sample tuples from a pseudo-distribution, threshold the
//! conditional vectors, then repair candidates by degree and prune overlaps.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::Graph;
use crate::oracle::{prune_by_intersection, sorted_intersection};
use crate::rng::{streams, substream};
use crate::sos::{mask_of, PseudoDistribution, SosError};

/// Resampling attempts before a tuple draw gives up.
pub const MAX_RETRIES: usize = 100;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("tuple sampling failed after {attempts} attempts: {source}")]
    Sampling { attempts: usize, source: SosError },
    #[error(transparent)]
    Sos(#[from] SosError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeParams {
    pub t: usize,
    pub repetitions: usize,
    pub delta: f64,
    /// Degree-repair threshold as a fraction of `k`; `None` uses `1 − (1−p)/6`.
    pub cleanup_threshold_fraction: Option<f64>,
    /// Pairwise intersection cap; `None` uses `⌈3 ln n / ln(1/p)⌉`.
    pub intersection_cap: Option<usize>,
}

impl DecodeParams {
    /// `t`, `N = ⌈4(n/k)^t⌉` and `δ = ¼`.
    pub fn with_defaults(n: usize, k: usize, t: usize) -> Self {
        Self {
            t,
            repetitions: default_repetitions(n, k, t),
            delta: 0.25,
            cleanup_threshold_fraction: None,
            intersection_cap: None,
        }
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.t == 0 {
            return Err(DecodeError::InvalidParameter("t must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(DecodeError::InvalidParameter("N must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(DecodeError::InvalidParameter(format!(
                "delta = {} not in (0, 1/2)",
                self.delta
            )));
        }
        Ok(())
    }

    pub fn threshold_fraction(&self, p: f64) -> f64 {
        self.cleanup_threshold_fraction
            .unwrap_or(1.0 - (1.0 - p) / 6.0)
    }

    pub fn cap(&self, n: usize, p: f64) -> usize {
        self.intersection_cap
            .unwrap_or_else(|| default_intersection_cap(n, p))
    }
}

pub fn default_repetitions(n: usize, k: usize, t: usize) -> usize {
    (4.0 * (n as f64 / k as f64).powi(t as i32)).ceil() as usize
}

/// `⌈3 ln n / ln(1/p)⌉`.
pub fn default_intersection_cap(n: usize, p: f64) -> usize {
    (3.0 * (n as f64).ln() / (1.0 / p).ln()).ceil() as usize
}

/// Upper bound `(n/k)(1 + 2nΔ/k²)` on a family of `k`-sets with pairwise
/// intersections at most `Δ`, valid when `k ≥ √(2nΔ)`.
pub fn pruned_list_bound(n: usize, k: usize, cap: usize) -> Option<f64> {
    let (n, k, cap) = (n as f64, k as f64, cap as f64);
    (k >= (2.0 * n * cap).sqrt()).then(|| (n / k) * (1.0 + 2.0 * n * cap / (k * k)))
}

fn draw(rng: &mut impl Rng, weights: &[f64]) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let mut r = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if r < w {
            return Some(i);
        }
        r -= w;
    }
    weights.iter().rposition(|&w| w > 0.0)
}

/// Draws `Q = (i₁, …, i_t)` with probability `Ẽ[w_Q]/k^t` by sequential
/// conditioning. Negative moments from solver noise are clamped to zero.
pub fn sample_tuple_with_rng(
    d: &PseudoDistribution,
    t: usize,
    rng: &mut impl Rng,
) -> Result<Vec<usize>, DecodeError> {
    if t + 1 > d.degree {
        return Err(SosError::DegreeOverflow {
            degree: t + 1,
            max: d.degree,
        }
        .into());
    }
    let floor = d.default_divisor_floor(t);
    let mut last = None;
    for _ in 0..MAX_RETRIES {
        let mut q = Vec::with_capacity(t);
        let mut base = 0u128;
        let mut ok = true;
        for _ in 0..t {
            let weights: Vec<f64> = (0..d.n)
                .map(|i| d.moment(base | (1u128 << i)).max(0.0))
                .collect();
            match draw(rng, &weights) {
                Some(i) => {
                    q.push(i);
                    base |= 1u128 << i;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        let value = d.moment(base);
        if ok && value > floor {
            return Ok(q);
        }
        last = Some(SosError::DivisorTooSmall { value, floor });
    }
    Err(DecodeError::Sampling {
        attempts: MAX_RETRIES,
        source: last.expect("at least one attempt"),
    })
}

pub fn sample_tuple(
    d: &PseudoDistribution,
    t: usize,
    seed: u64,
) -> Result<Vec<usize>, DecodeError> {
    sample_tuple_with_rng(d, t, &mut substream(seed, streams::DECODE_BASE))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub set: Vec<usize>,
    pub q: Vec<usize>,
    /// Sampling weight `Ẽ[w_Q]/k^t`.
    pub weight: f64,
    pub repetition: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanupTrace {
    pub candidate: usize,
    pub sizes: [usize; 3],
    pub is_clique: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeMetrics {
    pub contains_planted: bool,
    /// Largest `|S_Q ∩ S*|/k` over raw candidates.
    pub max_intersection_fraction: f64,
    pub list_length: usize,
}

/// Whether `ω·(n/k²)^t ≤ δk` held for the supplied certificate bound `ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingCondition {
    pub omega: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn rounding_condition(
    omega: f64,
    n: usize,
    k: usize,
    t: usize,
    delta: f64,
) -> RoundingCondition {
    let lhs = omega * (n as f64 / (k * k) as f64).powi(t as i32);
    let rhs = delta * k as f64;
    RoundingCondition {
        omega,
        lhs,
        rhs,
        holds: lhs <= rhs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub n: usize,
    pub k: usize,
    pub params: DecodeParams,
    pub seed: u64,
    /// Distinct thresholded sets, first occurrence kept.
    pub raw_candidates: Vec<Candidate>,
    pub cleanup: Vec<CleanupTrace>,
    pub final_list: Vec<Vec<usize>>,
    pub intersection_cap: Option<usize>,
    pub rounding_condition: Option<RoundingCondition>,
    pub metrics: Option<DecodeMetrics>,
}

impl DecodeReport {
    /// Fills `metrics` against a known planted set.
    pub fn evaluate(&mut self, planted: &[usize]) {
        let mut truth = planted.to_vec();
        truth.sort_unstable();
        let best = self
            .raw_candidates
            .iter()
            .map(|c| sorted_intersection(&c.set, &truth))
            .max()
            .unwrap_or(0);
        self.metrics = Some(DecodeMetrics {
            contains_planted: self.final_list.contains(&truth),
            max_intersection_fraction: best as f64 / self.k as f64,
            list_length: self.final_list.len(),
        });
    }
}

/// Runs the `N` repetitions, each on its own substream, and collects the
/// thresholded sets `S_Q = {i : C_Q(i) ≥ 1 − 2δ}`.
pub fn decode(
    g: &Graph,
    k: usize,
    params: &DecodeParams,
    d: &PseudoDistribution,
    seed: u64,
) -> Result<DecodeReport, DecodeError> {
    params.validate()?;
    if d.n != g.n() {
        return Err(DecodeError::InvalidParameter(format!(
            "pseudo-distribution has {} variables but the graph has {} vertices",
            d.n,
            g.n()
        )));
    }
    let threshold = 1.0 - 2.0 * params.delta;
    let kt = (k as f64).powi(params.t as i32);
    let draws: Vec<Candidate> = (0..params.repetitions)
        .into_par_iter()
        .map(|rep| {
            let mut rng = substream(seed, streams::DECODE_BASE + rep as u64);
            let q = sample_tuple_with_rng(d, params.t, &mut rng)?;
            let cv = d.reweight(&q, Some(0.0))?;
            let set = (0..d.n).filter(|&i| cv.values[i] >= threshold).collect();
            Ok(Candidate {
                set,
                weight: d.moment(mask_of(&q)) / kt,
                q,
                repetition: rep,
            })
        })
        .collect::<Result<_, DecodeError>>()?;
    let mut raw: Vec<Candidate> = Vec::new();
    for c in draws {
        if !raw.iter().any(|r| r.set == c.set) {
            raw.push(c);
        }
    }
    Ok(DecodeReport {
        n: g.n(),
        k,
        params: params.clone(),
        seed,
        raw_candidates: raw,
        cleanup: Vec::new(),
        final_list: Vec::new(),
        intersection_cap: None,
        rounding_condition: None,
        metrics: None,
    })
}

/// One degree-repair pass: the vertices with at least `tau` neighbours in `s`.
pub fn repair_pass(g: &Graph, s: &[usize], tau: f64) -> Vec<usize> {
    let members = crate::bits::BitSet::from_indices(g.n(), s.iter().copied());
    (0..g.n())
        .filter(|&v| g.neighbors(v).intersection_count(&members) as f64 >= tau)
        .collect()
}

/// Two repair passes per candidate with `τ = fk − 1`, keeps the `k`-cliques,
/// then prunes pairs meeting in more than the intersection cap.
pub fn cleanup(g: &Graph, k: usize, p: f64, raw: &DecodeReport) -> DecodeReport {
    let tau = raw.params.threshold_fraction(p) * k as f64 - 1.0;
    let cap = raw.params.cap(g.n(), p);
    let mut trace = Vec::with_capacity(raw.raw_candidates.len());
    let mut cliques = std::collections::BTreeSet::new();
    for (idx, c) in raw.raw_candidates.iter().enumerate() {
        let first = repair_pass(g, &c.set, tau);
        let second = repair_pass(g, &first, tau);
        let is_clique = second.len() == k && g.is_clique(&second);
        trace.push(CleanupTrace {
            candidate: idx,
            sizes: [c.set.len(), first.len(), second.len()],
            is_clique,
        });
        if is_clique {
            cliques.insert(second);
        }
    }
    let mut report = raw.clone();
    report.cleanup = trace;
    report.final_list = prune_by_intersection(cliques.into_iter().collect(), cap);
    report.intersection_cap = Some(cap);
    report
}
