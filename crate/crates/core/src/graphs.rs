//! Graphs, bipartite graphs and seeded semi-random instance generation.
//!
//! A semi-random instance is produced in three phases: a uniformly random
//! `k`-clique is planted in `G(n, p)`; a deletion strategy may remove edges of
//! the cut between the planted set and its complement; an addition strategy may
//! rewrite edges with both endpoints outside the planted set. Each phase reads
//! its own substream (see [`crate::rng`]), and adversary strategies only see the
//! graph produced by the earlier phases.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitSet;
use crate::rng::{self, streams};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed edge list: {0}")]
    Parse(String),
}

/// Simple undirected graph on `{0..n-1}` stored as a sorted list of `(i, j)`
/// pairs with `i < j`. A dense bitset adjacency is built lazily.
#[derive(Clone, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adjacency: OnceLock<Vec<BitSet>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    /// Builds a graph, canonicalizing each pair to `(min, max)` and dropping duplicates.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self {
            n,
            edges: set.into_iter().collect(),
            adjacency: OnceLock::new(),
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            adjacency: OnceLock::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self {
            n,
            edges,
            adjacency: OnceLock::new(),
        }
    }

    fn from_rows(rows: &[BitSet]) -> Self {
        let n = rows.len();
        let edges = (0..n)
            .flat_map(|i| rows[i].iter().filter(move |&j| j > i).map(move |j| (i, j)))
            .collect();
        Self {
            n,
            edges,
            adjacency: OnceLock::new(),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> &[BitSet] {
        self.adjacency.get_or_init(|| {
            let mut rows = vec![BitSet::new(self.n); self.n];
            for &(u, v) in &self.edges {
                rows[u].insert(v);
                rows[v].insert(u);
            }
            rows
        })
    }

    pub fn neighbors(&self, v: usize) -> &BitSet {
        &self.adjacency()[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && u < self.n && v < self.n && self.adjacency()[u].contains(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency()[v].count()
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(a, &u)| {
            u < self.n
                && vertices[a + 1..]
                    .iter()
                    .all(|&v| u != v && self.has_edge(u, v))
        })
    }

    /// Returns a copy with the extra edges added.
    pub fn with_added_edges(
        &self,
        extra: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        Graph::new(self.n, self.edges.iter().copied().chain(extra))
    }

    /// Text form: first line `n m`, then one `u v` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = data_lines(text);
        let header = lines
            .next()
            .ok_or_else(|| GraphError::Parse("empty input".into()))?;
        let [n, m] = parse_ints::<2>(header)?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let [u, v] = parse_ints::<2>(line)?;
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(GraphError::Parse(format!(
                "header announces {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::new(n, edges)
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn parse_ints<const N: usize>(line: &str) -> Result<[usize; N], GraphError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != N {
        return Err(GraphError::Parse(format!(
            "expected {N} integers in line {line:?}"
        )));
    }
    let mut out = [0usize; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p
            .parse()
            .map_err(|_| GraphError::Parse(format!("not an integer: {p:?}")))?;
    }
    Ok(out)
}

/// Bipartite graph with left vertices `0..left_size` and right vertices `0..right_size`.
#[derive(Clone, Serialize, Deserialize)]
pub struct BipartiteGraph {
    left_size: usize,
    right_size: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    rows: OnceLock<Vec<BitSet>>,
}

impl PartialEq for BipartiteGraph {
    fn eq(&self, other: &Self) -> bool {
        self.left_size == other.left_size
            && self.right_size == other.right_size
            && self.edges == other.edges
    }
}

impl std::fmt::Debug for BipartiteGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BipartiteGraph")
            .field("left_size", &self.left_size)
            .field("right_size", &self.right_size)
            .field("edges", &self.edges)
            .finish()
    }
}

impl BipartiteGraph {
    pub fn new(
        left_size: usize,
        right_size: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= left_size {
                return Err(GraphError::VertexOutOfRange {
                    vertex: u,
                    n: left_size,
                });
            }
            if v >= right_size {
                return Err(GraphError::VertexOutOfRange {
                    vertex: v,
                    n: right_size,
                });
            }
            set.insert((u, v));
        }
        Ok(Self {
            left_size,
            right_size,
            edges: set.into_iter().collect(),
            rows: OnceLock::new(),
        })
    }

    pub fn complete(left_size: usize, right_size: usize) -> Self {
        let edges = (0..left_size)
            .flat_map(|u| (0..right_size).map(move |v| (u, v)))
            .collect();
        Self {
            left_size,
            right_size,
            edges,
            rows: OnceLock::new(),
        }
    }

    pub fn empty(left_size: usize, right_size: usize) -> Self {
        Self {
            left_size,
            right_size,
            edges: Vec::new(),
            rows: OnceLock::new(),
        }
    }

    pub fn left_size(&self) -> usize {
        self.left_size
    }

    pub fn right_size(&self) -> usize {
        self.right_size
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Right-neighborhood bitset of each left vertex.
    pub fn left_rows(&self) -> &[BitSet] {
        self.rows.get_or_init(|| {
            let mut rows = vec![BitSet::new(self.right_size); self.left_size];
            for &(u, v) in &self.edges {
                rows[u].insert(v);
            }
            rows
        })
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.left_size && self.left_rows()[u].contains(v)
    }

    /// `+1` if the edge is present, `-1` otherwise.
    pub fn signed(&self, u: usize, v: usize) -> f64 {
        if self.has_edge(u, v) {
            1.0
        } else {
            -1.0
        }
    }

    /// Mean-zero, variance-one character of the edge indicator at density `p`.
    pub fn p_biased(&self, u: usize, v: usize, p: f64) -> f64 {
        p_biased_value(self.has_edge(u, v), p)
    }

    pub fn p_biased_matrix(&self, p: f64) -> DMatrix<f64> {
        let on = p_biased_value(true, p);
        let off = p_biased_value(false, p);
        let rows = self.left_rows();
        DMatrix::from_fn(self.left_size, self.right_size, |u, v| {
            if rows[u].contains(v) {
                on
            } else {
                off
            }
        })
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let rows = self.left_rows();
        DMatrix::from_fn(self.left_size, self.right_size, |u, v| {
            if rows[u].contains(v) {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.right_size];
        for &(_, v) in &self.edges {
            deg[v] += 1;
        }
        deg
    }

    pub fn max_right_degree(&self) -> usize {
        self.right_degrees().into_iter().max().unwrap_or(0)
    }

    /// Text form: first line `k m e`, then one `left right` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!(
            "{} {} {}\n",
            self.left_size,
            self.right_size,
            self.edges.len()
        );
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = data_lines(text);
        let header = lines
            .next()
            .ok_or_else(|| GraphError::Parse("empty input".into()))?;
        let [k, m, e] = parse_ints::<3>(header)?;
        let mut edges = Vec::with_capacity(e);
        for line in lines {
            let [u, v] = parse_ints::<2>(line)?;
            edges.push((u, v));
        }
        if edges.len() != e {
            return Err(GraphError::Parse(format!(
                "header announces {e} edges, found {}",
                edges.len()
            )));
        }
        BipartiteGraph::new(k, m, edges)
    }
}

pub fn p_biased_value(present: bool, p: f64) -> f64 {
    if present {
        ((1.0 - p) / p).sqrt()
    } else {
        -(p / (1.0 - p)).sqrt()
    }
}

/// Monotone deletions applied to edges between the planted set and its complement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "param", rename_all = "snake_case")]
pub enum DeletionStrategy {
    #[default]
    None,
    DeleteAllCut,
    /// Each cut edge is removed independently with the given probability.
    DeleteRandomCutFraction(f64),
    /// Cut edges of planted vertices are removed, lowest outside index first,
    /// until every planted vertex has the minimum cut degree.
    DegreeFlatten,
}

/// Rewrites of the subgraph induced on the complement of the planted set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "param", rename_all = "snake_case")]
pub enum AdditionStrategy {
    #[default]
    None,
    /// Plants this many further `k`-cliques on disjoint random subsets.
    DisjointPlantedCopies(usize),
    /// Adds every edge inside a random subset of the given size.
    FullCliqueOnComplementSubset(usize),
    /// Resamples every pair independently with the given probability.
    ErdosRenyiRewrite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct AdversaryPlan {
    pub deletion: DeletionStrategy,
    pub addition: AdditionStrategy,
}

impl AdversaryPlan {
    pub fn new(deletion: DeletionStrategy, addition: AdditionStrategy) -> Self {
        Self { deletion, addition }
    }

    fn validate(&self, n: usize, k: usize) -> Result<(), GraphError> {
        let outside = n - k;
        match self.deletion {
            DeletionStrategy::DeleteRandomCutFraction(phi) if !(0.0..=1.0).contains(&phi) => {
                return Err(GraphError::InvalidParameter(format!(
                    "deletion fraction {phi} not in [0,1]"
                )));
            }
            _ => {}
        }
        match self.addition {
            AdditionStrategy::DisjointPlantedCopies(c) if c * k > outside => {
                Err(GraphError::InvalidParameter(format!(
                    "{c} disjoint copies of a {k}-clique do not fit in {outside} outside vertices"
                )))
            }
            AdditionStrategy::FullCliqueOnComplementSubset(s) if s > outside => {
                Err(GraphError::InvalidParameter(format!(
                    "complement clique size {s} exceeds n - k = {outside}"
                )))
            }
            AdditionStrategy::ErdosRenyiRewrite(q) if !(0.0..=1.0).contains(&q) => Err(
                GraphError::InvalidParameter(format!("rewrite density {q} not in [0,1]")),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FkParams {
    pub n: usize,
    pub k: usize,
    pub p: f64,
}

/// A generated semi-random instance together with its hidden planted clique.
#[derive(Debug, Clone, PartialEq)]
pub struct FkInstance {
    pub graph: Graph,
    pub planted: Vec<usize>,
    pub params: FkParams,
    pub plan: AdversaryPlan,
    pub seed: u64,
}

/// The graph after each generation phase.
#[derive(Debug, Clone)]
pub struct FkPhases {
    pub random: Graph,
    pub after_deletion: Graph,
    pub instance: FkInstance,
}

fn check_probability(name: &str, p: f64) -> Result<(), GraphError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GraphError::InvalidParameter(format!(
            "{name} = {p} not in [0,1]"
        )))
    }
}

/// Erdős–Rényi graph `G(n, p)`.
pub fn sample_er_graph(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    check_probability("p", p)?;
    let mut rng = rng::substream(seed, streams::RANDOM_GRAPH);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Ok(Graph {
        n,
        edges,
        adjacency: OnceLock::new(),
    })
}

/// Bipartite Erdős–Rényi graph `B(k, m, p)`.
pub fn sample_er_bipartite(
    k: usize,
    m: usize,
    p: f64,
    seed: u64,
) -> Result<BipartiteGraph, GraphError> {
    check_probability("p", p)?;
    let mut rng = rng::substream(seed, streams::BIPARTITE);
    let mut edges = Vec::new();
    for u in 0..k {
        for v in 0..m {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(BipartiteGraph {
        left_size: k,
        right_size: m,
        edges,
        rows: OnceLock::new(),
    })
}

fn set_edge(rows: &mut [BitSet], u: usize, v: usize, present: bool) {
    if present {
        rows[u].insert(v);
        rows[v].insert(u);
    } else {
        rows[u].remove(v);
        rows[v].remove(u);
    }
}

fn random_subset<R: Rng>(rng: &mut R, pool: &[usize], size: usize) -> Vec<usize> {
    let mut picked: Vec<usize> = index::sample(rng, pool.len(), size)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    picked.sort_unstable();
    picked
}

fn apply_deletion(rows: &mut [BitSet], planted: &BitSet, strategy: DeletionStrategy, seed: u64) {
    let n = rows.len();
    let inside: Vec<usize> = planted.to_vec();
    let cut_neighbors = |rows: &[BitSet], u: usize| -> Vec<usize> {
        rows[u].iter().filter(|&v| !planted.contains(v)).collect()
    };
    match strategy {
        DeletionStrategy::None => {}
        DeletionStrategy::DeleteAllCut => {
            for &u in &inside {
                for v in cut_neighbors(rows, u) {
                    set_edge(rows, u, v, false);
                }
            }
        }
        DeletionStrategy::DeleteRandomCutFraction(phi) => {
            let mut rng = rng::substream(seed, streams::DELETION);
            for &u in &inside {
                for v in 0..n {
                    if planted.contains(v) || !rows[u].contains(v) {
                        continue;
                    }
                    if rng.random_bool(phi) {
                        set_edge(rows, u, v, false);
                    }
                }
            }
        }
        DeletionStrategy::DegreeFlatten => {
            let target = inside
                .iter()
                .map(|&u| cut_neighbors(rows, u).len())
                .min()
                .unwrap_or(0);
            for &u in &inside {
                let nbrs = cut_neighbors(rows, u);
                let excess = nbrs.len() - target;
                for &v in nbrs.iter().take(excess) {
                    set_edge(rows, u, v, false);
                }
            }
        }
    }
}

fn apply_addition(
    rows: &mut [BitSet],
    planted: &BitSet,
    k: usize,
    strategy: AdditionStrategy,
    seed: u64,
) {
    let n = rows.len();
    let outside: Vec<usize> = (0..n).filter(|&v| !planted.contains(v)).collect();
    let mut rng = rng::substream(seed, streams::ADDITION);
    let make_clique = |rows: &mut [BitSet], vs: &[usize]| {
        for (a, &u) in vs.iter().enumerate() {
            for &v in &vs[a + 1..] {
                set_edge(rows, u, v, true);
            }
        }
    };
    match strategy {
        AdditionStrategy::None => {}
        AdditionStrategy::DisjointPlantedCopies(count) => {
            let mut chosen: Vec<usize> = index::sample(&mut rng, outside.len(), count * k)
                .into_iter()
                .map(|i| outside[i])
                .collect();
            for chunk in chosen.chunks_mut(k.max(1)) {
                chunk.sort_unstable();
                make_clique(rows, chunk);
            }
        }
        AdditionStrategy::FullCliqueOnComplementSubset(size) => {
            let subset = random_subset(&mut rng, &outside, size);
            make_clique(rows, &subset);
        }
        AdditionStrategy::ErdosRenyiRewrite(q) => {
            for (a, &u) in outside.iter().enumerate() {
                for &v in &outside[a + 1..] {
                    let present = rng.random_bool(q);
                    set_edge(rows, u, v, present);
                }
            }
        }
    }
}

/// Generates an instance and returns the graph after every phase.
pub fn sample_fk_phases(
    n: usize,
    k: usize,
    p: f64,
    plan: AdversaryPlan,
    seed: u64,
) -> Result<FkPhases, GraphError> {
    if k == 0 || k > n {
        return Err(GraphError::InvalidParameter(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    check_probability("p", p)?;
    plan.validate(n, k)?;

    let base = sample_er_graph(n, p, seed)?;
    let mut rows = base.adjacency().to_vec();
    let mut planted = {
        let mut r = rng::substream(seed, streams::PLANTED_SET);
        index::sample(&mut r, n, k).into_vec()
    };
    planted.sort_unstable();
    for (a, &u) in planted.iter().enumerate() {
        for &v in &planted[a + 1..] {
            set_edge(&mut rows, u, v, true);
        }
    }
    let random = Graph::from_rows(&rows);
    let planted_bits = BitSet::from_indices(n, planted.iter().copied());

    apply_deletion(&mut rows, &planted_bits, plan.deletion, seed);
    let after_deletion = Graph::from_rows(&rows);

    apply_addition(&mut rows, &planted_bits, k, plan.addition, seed);
    let graph = Graph::from_rows(&rows);

    Ok(FkPhases {
        random,
        after_deletion,
        instance: FkInstance {
            graph,
            planted,
            params: FkParams { n, k, p },
            plan,
            seed,
        },
    })
}

pub fn sample_fk(
    n: usize,
    k: usize,
    p: f64,
    plan: AdversaryPlan,
    seed: u64,
) -> Result<FkInstance, GraphError> {
    sample_fk_phases(n, k, p, plan, seed).map(|ph| ph.instance)
}

/// Cut graph between `s` (left, sorted) and its complement (right, sorted).
/// Duplicate entries of `s` are ignored.
pub fn cut_graph(g: &Graph, s: &[usize]) -> Result<BipartiteGraph, GraphError> {
    let n = g.n();
    if let Some(&bad) = s.iter().find(|&&v| v >= n) {
        return Err(GraphError::VertexOutOfRange { vertex: bad, n });
    }
    let (left, right) = cut_sides(n, s);
    let mut right_index = vec![usize::MAX; n];
    for (j, &v) in right.iter().enumerate() {
        right_index[v] = j;
    }
    let mut edges = Vec::new();
    for (i, &u) in left.iter().enumerate() {
        for v in g.neighbors(u).iter() {
            if right_index[v] != usize::MAX {
                edges.push((i, right_index[v]));
            }
        }
    }
    BipartiteGraph::new(left.len(), right.len(), edges)
}

/// Vertex labels of the two sides of [`cut_graph`].
pub fn cut_sides(n: usize, s: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let inside = BitSet::from_indices(n, s.iter().copied());
    let left = inside.to_vec();
    let right = (0..n).filter(|&v| !inside.contains(v)).collect();
    (left, right)
}

/// A draw from the planted-biclique distribution together with its hidden sides.
#[derive(Debug, Clone)]
pub struct PlantedBiclique {
    pub graph: BipartiteGraph,
    pub left_set: Vec<usize>,
    pub right_set: Vec<usize>,
}

/// Edge probability for pairs in `S × ¬P` under the planted-biclique model.
pub fn reduced_edge_probability(k: usize, n: usize, l: usize, p: f64) -> Result<f64, GraphError> {
    if l > k {
        return Err(GraphError::InvalidParameter(format!(
            "l = {l} exceeds k = {k}"
        )));
    }
    let right_mass = (k - l) as f64;
    let denom = n as f64 - right_mass;
    if denom <= 0.0 {
        return Err(GraphError::InvalidParameter(format!(
            "need n > k - l, got n={n}, k-l={}",
            k - l
        )));
    }
    let q = (n as f64 * p - right_mass) / denom;
    if !(0.0..=1.0).contains(&q) {
        return Err(GraphError::InvalidParameter(format!(
            "reduced edge probability {q} not in [0,1] for k={k}, n={n}, l={l}, p={p}"
        )));
    }
    Ok(q)
}

pub fn sample_planted_biclique(
    k: usize,
    n: usize,
    l: usize,
    p: f64,
    seed: u64,
) -> Result<PlantedBiclique, GraphError> {
    check_probability("p", p)?;
    let reduced = reduced_edge_probability(k, n, l, p)?;
    let mut rng = rng::substream(seed, streams::PLANTED_BICLIQUE);
    let left_prob = if k == 0 { 0.0 } else { l as f64 / k as f64 };
    let right_prob = (k - l) as f64 / n as f64;
    let left_set: Vec<usize> = (0..k).filter(|_| rng.random_bool(left_prob)).collect();
    let right_set: Vec<usize> = (0..n).filter(|_| rng.random_bool(right_prob)).collect();
    let in_left = BitSet::from_indices(k, left_set.iter().copied());
    let in_right = BitSet::from_indices(n, right_set.iter().copied());
    let mut edges = Vec::new();
    for u in 0..k {
        for v in 0..n {
            let prob = match (in_left.contains(u), in_right.contains(v)) {
                (true, true) => 1.0,
                (true, false) => reduced,
                _ => p,
            };
            if rng.random_bool(prob) {
                edges.push((u, v));
            }
        }
    }
    Ok(PlantedBiclique {
        graph: BipartiteGraph::new(k, n, edges)?,
        left_set,
        right_set,
    })
}

/// JSON instance file. The planted set lives under `solution`, which graph
/// readers ([`GraphFile`]) never deserialize.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub params: FkParams,
    pub plan: AdversaryPlan,
    pub seed: u64,
    pub edges: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solution: Option<Vec<usize>>,
}

impl From<&FkInstance> for InstanceFile {
    fn from(inst: &FkInstance) -> Self {
        Self {
            n: inst.graph.n(),
            params: inst.params,
            plan: inst.plan,
            seed: inst.seed,
            edges: inst.graph.edges().to_vec(),
            solution: Some(inst.planted.clone()),
        }
    }
}

/// Graph-only view of an instance file.
#[derive(Debug, Clone, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<Graph, GraphError> {
        Graph::new(self.n, self.edges)
    }
}

/// Reads a graph from either the JSON instance format or the edge-list text format.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    if text.trim_start().starts_with('{') {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        file.into_graph()
    } else {
        Graph::parse_edge_list(text)
    }
}

/// Reads a bipartite graph from JSON (`left_size`, `right_size`, `edges`) or edge-list text.
pub fn parse_bipartite(text: &str) -> Result<BipartiteGraph, GraphError> {
    if text.trim_start().starts_with('{') {
        #[derive(Deserialize)]
        struct Raw {
            left_size: usize,
            right_size: usize,
            edges: Vec<(usize, usize)>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        BipartiteGraph::new(raw.left_size, raw.right_size, raw.edges)
    } else {
        BipartiteGraph::parse_edge_list(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_bipartite_degenerate_cases() {
        let full = sample_er_bipartite(2, 3, 1.0, 7).unwrap();
        assert_eq!(full.edge_count(), 6);
        let none = sample_er_bipartite(0, 5, 0.5, 1).unwrap();
        assert_eq!(none.left_size(), 0);
        assert_eq!(none.edge_count(), 0);
        assert!(sample_er_bipartite(2, 2, 1.5, 0).is_err());
    }

    #[test]
    fn fk_full_clique_when_k_equals_n() {
        let inst = sample_fk(6, 6, 0.0, AdversaryPlan::default(), 3).unwrap();
        assert_eq!(inst.graph, Graph::complete(6));
        assert_eq!(inst.planted, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn fk_delete_all_cut_isolates_planted_clique() {
        let plan = AdversaryPlan::new(DeletionStrategy::DeleteAllCut, AdditionStrategy::None);
        let inst = sample_fk(30, 14, 0.5, plan, 5).unwrap();
        assert!(inst.graph.is_clique(&inst.planted));
        let bip = cut_graph(&inst.graph, &inst.planted).unwrap();
        assert_eq!(bip.edge_count(), 0);
    }

    #[test]
    fn fk_rejects_out_of_range_plans() {
        let plan = AdversaryPlan::new(
            DeletionStrategy::None,
            AdditionStrategy::FullCliqueOnComplementSubset(17),
        );
        assert!(matches!(
            sample_fk(30, 14, 0.5, plan, 1),
            Err(GraphError::InvalidParameter(_))
        ));
        let plan = AdversaryPlan::new(
            DeletionStrategy::None,
            AdditionStrategy::DisjointPlantedCopies(2),
        );
        assert!(sample_fk(30, 14, 0.5, plan, 1).is_err());
        assert!(sample_fk(5, 0, 0.5, AdversaryPlan::default(), 1).is_err());
        assert!(sample_fk(5, 6, 0.5, AdversaryPlan::default(), 1).is_err());
    }

    #[test]
    fn degree_flatten_equalizes_cut_degrees() {
        let plan = AdversaryPlan::new(DeletionStrategy::DegreeFlatten, AdditionStrategy::None);
        let inst = sample_fk(40, 10, 0.5, plan, 11).unwrap();
        let bip = cut_graph(&inst.graph, &inst.planted).unwrap();
        let degs: Vec<usize> = bip.left_rows().iter().map(BitSet::count).collect();
        assert!(degs.windows(2).all(|w| w[0] == w[1]), "{degs:?}");
    }

    #[test]
    fn cut_graph_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(
            cut_graph(&k4, &[0, 1]).unwrap(),
            BipartiteGraph::complete(2, 2)
        );
        assert_eq!(
            cut_graph(&Graph::empty(4), &[0, 1]).unwrap(),
            BipartiteGraph::empty(2, 2)
        );
        let c5 = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        // right side is [2, 3, 4]: vertex 4 has right index 2, vertex 2 has right index 0
        let cut = cut_graph(&c5, &[0, 1]).unwrap();
        assert_eq!(cut.edges(), &[(0, 2), (1, 0)]);
    }

    #[test]
    fn p_biased_view() {
        let h = BipartiteGraph::new(1, 2, [(0, 0)]).unwrap();
        let p = 0.2;
        assert!((h.p_biased(0, 0, p) - 2.0).abs() < 1e-12);
        assert!((h.p_biased(0, 1, p) + 0.5).abs() < 1e-12);
        assert_eq!(h.signed(0, 1), -1.0);
    }

    #[test]
    fn reduced_probability_matches_model() {
        assert!((reduced_edge_probability(4, 6, 2, 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!(reduced_edge_probability(4, 6, 0, 0.1).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::new(5, [(3, 1), (0, 4)]).unwrap();
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
        let h = BipartiteGraph::new(2, 3, [(1, 2), (0, 0)]).unwrap();
        assert_eq!(
            BipartiteGraph::parse_edge_list(&h.to_edge_list()).unwrap(),
            h
        );
        assert!(Graph::parse_edge_list("3 2\n0 1\n").is_err());
        assert!(matches!(
            Graph::new(3, [(1, 1)]),
            Err(GraphError::SelfLoop(1))
        ));
    }

    #[test]
    fn instance_file_hides_solution_from_graph_reader() {
        let inst = sample_fk(12, 4, 0.5, AdversaryPlan::default(), 2).unwrap();
        let json = serde_json::to_string(&InstanceFile::from(&inst)).unwrap();
        assert!(json.contains("\"solution\""));
        assert_eq!(parse_graph(&json).unwrap(), inst.graph);
    }
}
