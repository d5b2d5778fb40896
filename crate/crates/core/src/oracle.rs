//! Brute-force ground truth: exact biclique search, good-clique enumeration and
//! the quasipolynomial clique lister.
//!
//! These routines are exponential in the small side and exist to validate the
//! certificates and the decoder on instances small enough to enumerate.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitSet;
use crate::graphs::{cut_graph, BipartiteGraph, Graph};

/// Largest left side accepted by the subset enumerations.
pub const MAX_LEFT_SIZE: usize = 24;
/// Default cap on the number of cliques an enumeration may produce.
pub const DEFAULT_CLIQUE_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("left side {left_size} exceeds the enumeration limit {limit}")]
    TooLarge { left_size: usize, limit: usize },
    #[error("more than {0} cliques; enumeration aborted")]
    TooManyCliques(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BicliqueWitness {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl BicliqueWitness {
    pub fn is_biclique_of(&self, h: &BipartiteGraph) -> bool {
        self.left
            .iter()
            .all(|&u| self.right.iter().all(|&v| h.has_edge(u, v)))
    }
}

fn check_left(h: &BipartiteGraph) -> Result<(), OracleError> {
    if h.left_size() > MAX_LEFT_SIZE {
        return Err(OracleError::TooLarge {
            left_size: h.left_size(),
            limit: MAX_LEFT_SIZE,
        });
    }
    Ok(())
}

/// Visits every nonempty left subset `L` whose common right neighborhood is
/// nonempty, passing `(L, common)`. Subsets with empty common neighborhood
/// are pruned together with all their supersets.
fn for_each_left_subset(h: &BipartiteGraph, mut visit: impl FnMut(&[usize], &BitSet)) {
    fn rec(
        rows: &[BitSet],
        start: usize,
        current: &mut Vec<usize>,
        common: &BitSet,
        visit: &mut dyn FnMut(&[usize], &BitSet),
    ) {
        for u in start..rows.len() {
            let mut next = common.clone();
            next.intersect_with(&rows[u]);
            if next.is_empty() {
                continue;
            }
            current.push(u);
            visit(current, &next);
            rec(rows, u + 1, current, &next, visit);
            current.pop();
        }
    }
    let rows = h.left_rows();
    let all = BitSet::full(h.right_size());
    rec(rows, 0, &mut Vec::new(), &all, &mut visit);
}

/// For each `l` in `0..k`, whether `H` contains an `l × (k − l)` biclique.
pub fn biclique_left_sizes(h: &BipartiteGraph, k: usize) -> Result<Vec<bool>, OracleError> {
    check_left(h)?;
    let mut found = vec![false; k];
    if k == 0 {
        return Ok(found);
    }
    found[0] = h.right_size() >= k;
    for_each_left_subset(h, |l, common| {
        let size = l.len();
        if size < k && common.count() >= k - size {
            found[size] = true;
        }
    });
    Ok(found)
}

/// Maximum `l` such that `H` has an `l × (k − l)` biclique with `k − l ≥ 1`, or 0.
pub fn max_biclique_left(h: &BipartiteGraph, k: usize) -> Result<usize, OracleError> {
    let sizes = biclique_left_sizes(h, k)?;
    Ok(sizes.iter().rposition(|&f| f).unwrap_or(0))
}

/// A witness for [`max_biclique_left`] when the maximum is at least 1.
pub fn max_biclique_witness(
    h: &BipartiteGraph,
    k: usize,
) -> Result<Option<BicliqueWitness>, OracleError> {
    check_left(h)?;
    let mut best: Option<BicliqueWitness> = None;
    for_each_left_subset(h, |l, common| {
        let size = l.len();
        if size >= k || common.count() < k - size {
            return;
        }
        if best.as_ref().is_none_or(|b| b.left.len() < size) {
            best = Some(BicliqueWitness {
                left: l.to_vec(),
                right: common.iter().take(k - size).collect(),
            });
        }
    });
    Ok(best)
}

/// All `k`-cliques of `G` in lexicographic order.
pub fn enumerate_k_cliques(
    g: &Graph,
    k: usize,
    cap: usize,
) -> Result<Vec<Vec<usize>>, OracleError> {
    fn rec(
        g: &Graph,
        k: usize,
        cap: usize,
        current: &mut Vec<usize>,
        candidates: &BitSet,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<(), OracleError> {
        if current.len() == k {
            if out.len() == cap {
                return Err(OracleError::TooManyCliques(cap));
            }
            out.push(current.clone());
            return Ok(());
        }
        if current.len() + candidates.count() < k {
            return Ok(());
        }
        for v in candidates.iter() {
            let mut next = candidates.clone();
            next.intersect_with(g.neighbors(v));
            // keep only later vertices so each clique is produced once
            for u in candidates.iter().take_while(|&u| u <= v) {
                next.remove(u);
            }
            current.push(v);
            rec(g, k, cap, current, &next, out)?;
            current.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    if k == 0 || k > g.n() {
        return Ok(out);
    }
    rec(g, k, cap, &mut Vec::new(), &BitSet::full(g.n()), &mut out)?;
    Ok(out)
}

/// `k`-cliques whose cut graph has no biclique with more than `l` left vertices,
/// at least one right vertex and `k` vertices in total.
pub fn exact_good_clique_list(
    g: &Graph,
    k: usize,
    l: usize,
) -> Result<Vec<Vec<usize>>, OracleError> {
    if k > MAX_LEFT_SIZE {
        return Err(OracleError::TooLarge {
            left_size: k,
            limit: MAX_LEFT_SIZE,
        });
    }
    let mut good = Vec::new();
    for clique in enumerate_k_cliques(g, k, DEFAULT_CLIQUE_CAP)? {
        let cut = cut_graph(g, &clique).expect("clique vertices are in range");
        let sizes = biclique_left_sizes(&cut, k)?;
        if !sizes.iter().enumerate().any(|(size, &f)| f && size > l) {
            good.push(clique);
        }
    }
    Ok(good)
}

/// Seed size `⌈c · log₂ n⌉` used by [`quasi_brute_force`].
pub fn seed_size(n: usize, c: f64) -> usize {
    if n < 2 {
        return 0;
    }
    (c * (n as f64).log2()).ceil().max(0.0) as usize
}

/// Smallest `c` whose seed size is at least 2.
pub fn default_seed_constant(n: usize) -> f64 {
    if n < 2 {
        return 1.0;
    }
    2.0 / (n as f64).log2()
}

/// Lists `U ∪ N(U)` over all small cliques `U` whenever that union is a `k`-clique,
/// then greedily drops cliques meeting an earlier kept one in more than the seed size.
pub fn quasi_brute_force(g: &Graph, k: usize, c: f64) -> Result<Vec<Vec<usize>>, OracleError> {
    let s = seed_size(g.n(), c);
    if s == 0 {
        return Err(OracleError::InvalidParameter(format!(
            "seed size ceil(c log2 n) must be at least 1 (c = {c}, n = {})",
            g.n()
        )));
    }
    let mut found = BTreeSet::new();
    for seed in enumerate_k_cliques(g, s, DEFAULT_CLIQUE_CAP)? {
        let mut common = BitSet::full(g.n());
        for &u in &seed {
            common.intersect_with(g.neighbors(u));
        }
        let union = BitSet::from_indices(g.n(), seed.iter().copied().chain(common.iter()));
        let members = union.to_vec();
        if members.len() == k && g.is_clique(&members) {
            found.insert(members);
        }
    }
    Ok(prune_by_intersection(found.into_iter().collect(), s))
}

/// Keeps sets in the given order, dropping any that meets an already kept set
/// in more than `cap` elements.
pub fn prune_by_intersection(sets: Vec<Vec<usize>>, cap: usize) -> Vec<Vec<usize>> {
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for set in sets {
        if kept.iter().all(|k| sorted_intersection(k, &set) <= cap) {
            kept.push(set);
        }
    }
    kept
}

/// Size of the intersection of two sorted slices.
pub fn sorted_intersection(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}
