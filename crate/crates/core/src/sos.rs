//! Moment relaxations of the `k`-clique axioms and pseudo-distributions.
//!
//! Monomials are multilinear (`w_i² = w_i`), so a moment is indexed by a vertex
//! subset, stored as a `u128` mask. The degree-`d` relaxation uses the moment
//! matrix over subsets of size at most `d/2`, with entry `(S, T) = Ẽ[w_{S∪T}]`,
//! one scalar per distinct subset of size at most `d`, zeros on every subset
//! that is not a clique, `Ẽ[1] = 1`, the cardinality identities
//! `Σ_i Ẽ[w_{S∪{i}}] = k·Ẽ[w_S]` and the box `[0, 1]`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::Graph;
use crate::sdp::{self, Objective, SdpProblem, SolveOptions, SolveStatus};

pub type Mask = u128;

/// Largest vertex count representable by subset masks.
pub const MAX_VERTICES: usize = 128;
/// Default cap on the moment-matrix side length before presolve.
pub const DEFAULT_ROW_BUDGET: usize = 2000;

#[derive(Debug, Error)]
pub enum SosError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("moment matrix side {rows} exceeds the budget {budget}")]
    Budget { rows: usize, budget: usize },
    #[error("monomial of degree {degree} exceeds the relaxation degree {max}")]
    DegreeOverflow { degree: usize, max: usize },
    #[error("divisor E[w_Q] = {value:e} is at most {floor:e}")]
    DivisorTooSmall { value: f64, floor: f64 },
    #[error("relaxation is infeasible: {0}")]
    Infeasible(String),
    #[error("solver stopped before convergence (eta = {:e})", .partial.eta)]
    NotConverged { partial: Box<PseudoDistribution> },
}

pub fn mask_of(vertices: &[usize]) -> Mask {
    vertices.iter().fold(0, |m, &v| m | (1u128 << v))
}

pub fn vertices_of(mask: Mask) -> Vec<usize> {
    (0..MAX_VERTICES).filter(|&v| mask >> v & 1 == 1).collect()
}

fn is_clique_mask(g: &Graph, mask: Mask) -> bool {
    let vs = vertices_of(mask);
    g.is_clique(&vs)
}

/// All subsets of `{0..n-1}` with at most `size` elements, by size then lexicographically.
fn subsets_up_to(n: usize, size: usize) -> Vec<Mask> {
    fn rec(n: usize, start: usize, left: usize, cur: Mask, out: &mut Vec<Mask>) {
        if left == 0 {
            out.push(cur);
            return;
        }
        for v in start..n {
            rec(n, v + 1, left - 1, cur | (1u128 << v), out);
        }
    }
    let mut out = Vec::new();
    for s in 0..=size.min(n) {
        rec(n, 0, s, 0, &mut out);
    }
    out
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// A built relaxation: the SDP plus the subset labels of its rows and variables.
#[derive(Debug, Clone)]
pub struct CliqueRelaxation {
    pub n: usize,
    pub k: usize,
    pub degree: usize,
    pub problem: SdpProblem,
    /// Subset labelling each moment-matrix row.
    pub rows: Vec<Mask>,
    /// Subset labelling each scalar variable.
    pub vars: Vec<Mask>,
    pub var_index: HashMap<Mask, usize>,
}

impl CliqueRelaxation {
    pub fn var(&self, mask: Mask) -> Option<usize> {
        self.var_index.get(&mask).copied()
    }
}

pub fn build_clique_relaxation(
    g: &Graph,
    k: usize,
    d: usize,
) -> Result<CliqueRelaxation, SosError> {
    build_clique_relaxation_with_budget(g, k, d, DEFAULT_ROW_BUDGET)
}

pub fn build_clique_relaxation_with_budget(
    g: &Graph,
    k: usize,
    d: usize,
    budget: usize,
) -> Result<CliqueRelaxation, SosError> {
    let n = g.n();
    if n > MAX_VERTICES {
        return Err(SosError::InvalidParameter(format!(
            "n = {n} exceeds {MAX_VERTICES}"
        )));
    }
    if !matches!(d, 2 | 4 | 6) {
        return Err(SosError::InvalidParameter(format!(
            "degree {d} not in {{2, 4, 6}}"
        )));
    }
    let half = d / 2;
    let row_count: usize = (0..=half).map(|i| binom(n, i)).sum();
    if row_count > budget {
        return Err(SosError::Budget {
            rows: row_count,
            budget,
        });
    }
    let rows = subsets_up_to(n, half);
    let mut var_index: HashMap<Mask, usize> = HashMap::new();
    let mut vars = Vec::new();
    let mut entry = vec![vec![0usize; 0]; rows.len()];
    for (a, &s) in rows.iter().enumerate() {
        entry[a] = rows[..=a]
            .iter()
            .map(|&t| {
                let u = s | t;
                *var_index.entry(u).or_insert_with(|| {
                    vars.push(u);
                    vars.len() - 1
                })
            })
            .collect();
    }
    let mut problem = SdpProblem::from_entry_map(rows.len(), vars.len(), |i, j| Some(entry[j][i]));
    problem.set_all_bounds(0.0, 1.0);
    let clique: Vec<bool> = vars.iter().map(|&m| is_clique_mask(g, m)).collect();
    for (v, &ok) in clique.iter().enumerate() {
        if !ok {
            problem.fix_zero_var(v);
        }
    }
    problem.add_constraint(vec![(var_index[&0], 1.0)], 1.0);
    for (v, &s) in vars.iter().enumerate() {
        let size = s.count_ones() as usize;
        if size + 1 > d || !clique[v] {
            continue;
        }
        let mut coeffs = vec![(v, size as f64 - k as f64)];
        for i in 0..n {
            if s >> i & 1 == 0 {
                let u = s | (1u128 << i);
                if let Some(&w) = var_index.get(&u) {
                    if clique[w] {
                        coeffs.push((w, 1.0));
                    }
                }
            }
        }
        problem.add_constraint(coeffs, 0.0);
    }
    let norm_rows = (0..n)
        .map(|i| vec![(var_index[&(1u128 << i)], 1.0)])
        .collect();
    problem.set_objective(Objective::SquaredNorm(norm_rows));
    Ok(CliqueRelaxation {
        n,
        k,
        degree: d,
        problem,
        rows,
        vars,
        var_index,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "PseudoDistributionFile", try_from = "PseudoDistributionFile")]
pub struct PseudoDistribution {
    pub degree: usize,
    pub n: usize,
    pub k: usize,
    /// Moments of clique subsets of size at most `degree`; other subsets are zero.
    pub moments: BTreeMap<Mask, f64>,
    /// Largest equality residual, box violation or negative eigenvalue.
    pub eta: f64,
    pub objective: f64,
    pub converged: bool,
}

#[derive(Serialize, Deserialize)]
struct PseudoDistributionFile {
    degree: usize,
    n: usize,
    k: usize,
    eta: f64,
    objective: f64,
    converged: bool,
    moments: BTreeMap<String, f64>,
}

pub fn subset_key(mask: Mask) -> String {
    vertices_of(mask)
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_key(key: &str) -> Result<Mask, String> {
    if key.is_empty() {
        return Ok(0);
    }
    let mut mask = 0;
    for part in key.split(',') {
        let v: usize = part
            .trim()
            .parse()
            .map_err(|_| format!("bad subset key {key:?}"))?;
        if v >= MAX_VERTICES {
            return Err(format!("vertex {v} out of range"));
        }
        mask |= 1u128 << v;
    }
    Ok(mask)
}

impl From<PseudoDistribution> for PseudoDistributionFile {
    fn from(d: PseudoDistribution) -> Self {
        Self {
            degree: d.degree,
            n: d.n,
            k: d.k,
            eta: d.eta,
            objective: d.objective,
            converged: d.converged,
            moments: d
                .moments
                .iter()
                .map(|(&m, &v)| (subset_key(m), v))
                .collect(),
        }
    }
}

impl TryFrom<PseudoDistributionFile> for PseudoDistribution {
    type Error = String;
    fn try_from(f: PseudoDistributionFile) -> Result<Self, String> {
        let moments = f
            .moments
            .iter()
            .map(|(k, &v)| parse_key(k).map(|m| (m, v)))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            degree: f.degree,
            n: f.n,
            k: f.k,
            moments,
            eta: f.eta,
            objective: f.objective,
            converged: f.converged,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalVector {
    pub q: Vec<usize>,
    /// `Ẽ[w_Q w_i] / Ẽ[w_Q]` for every vertex `i`.
    pub values: Vec<f64>,
}

impl PseudoDistribution {
    /// Uniform mixture of the indicator distributions of the given cliques.
    pub fn mixture(n: usize, k: usize, degree: usize, cliques: &[Vec<usize>]) -> Self {
        let mut moments = BTreeMap::new();
        let weight = 1.0 / cliques.len() as f64;
        for c in cliques {
            for s in subsets_up_to(c.len(), degree) {
                let mask = mask_of(&vertices_of(s).iter().map(|&i| c[i]).collect::<Vec<_>>());
                *moments.entry(mask).or_insert(0.0) += weight;
            }
        }
        let mut d = Self {
            degree,
            n,
            k,
            moments,
            eta: 0.0,
            objective: 0.0,
            converged: true,
        };
        d.objective = d.mean_vector().iter().map(|x| x * x).sum();
        d
    }

    pub fn point_mass(n: usize, k: usize, degree: usize, clique: &[usize]) -> Self {
        Self::mixture(n, k, degree, &[clique.to_vec()])
    }

    pub fn moment(&self, mask: Mask) -> f64 {
        self.moments.get(&mask).copied().unwrap_or(0.0)
    }

    /// `Ẽ[Π_{i∈S} w_i]` for a vertex multiset, merging repeated indices.
    pub fn pseudo_expectation(&self, s: &[usize]) -> Result<f64, SosError> {
        let mask = mask_of(s);
        let degree = mask.count_ones() as usize;
        if degree > self.degree {
            return Err(SosError::DegreeOverflow {
                degree,
                max: self.degree,
            });
        }
        Ok(self.moment(mask))
    }

    /// `(Ẽ[w_1], …, Ẽ[w_n])`.
    pub fn mean_vector(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.moment(1u128 << i)).collect()
    }

    /// Default divisor floor `1e-8·(k/n)^t`.
    pub fn default_divisor_floor(&self, t: usize) -> f64 {
        1e-8 * (self.k as f64 / self.n as f64).powi(t as i32)
    }

    /// Conditional vector `C_Q(i) = Ẽ[w_Q w_i] / Ẽ[w_Q]`.
    pub fn reweight(&self, q: &[usize], floor: Option<f64>) -> Result<ConditionalVector, SosError> {
        let base = mask_of(q);
        let support = base.count_ones() as usize;
        if support + 1 > self.degree {
            return Err(SosError::DegreeOverflow {
                degree: support + 1,
                max: self.degree,
            });
        }
        let floor = floor.unwrap_or_else(|| self.default_divisor_floor(q.len()));
        let denom = self.moment(base);
        if denom <= floor {
            return Err(SosError::DivisorTooSmall {
                value: denom,
                floor,
            });
        }
        let values = (0..self.n)
            .map(|i| self.moment(base | (1u128 << i)) / denom)
            .collect();
        Ok(ConditionalVector {
            q: q.to_vec(),
            values,
        })
    }

    /// Moment matrix over the clique subsets of size at most `degree/2`.
    pub fn moment_matrix(&self) -> (Vec<Mask>, DMatrix<f64>) {
        let half = self.degree / 2;
        let rows: Vec<Mask> = subsets_up_to(self.n, half)
            .into_iter()
            .filter(|&m| m == 0 || self.moments.contains_key(&m))
            .collect();
        let x = DMatrix::from_fn(rows.len(), rows.len(), |a, b| {
            self.moment(rows[a] | rows[b])
        });
        (rows, x)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        sdp::min_eigenvalue(&self.moment_matrix().1)
    }

    /// Largest violation of `Ẽ[1] = 1`, the cardinality identities and the box,
    /// given the clique structure of `g`.
    pub fn constraint_residual(&self, g: &Graph) -> f64 {
        let mut worst = (self.moment(0) - 1.0).abs();
        for (&s, &v) in &self.moments {
            worst = worst.max((-v).max(v - 1.0).max(0.0));
            if !is_clique_mask(g, s) {
                worst = worst.max(v.abs());
            }
            if (s.count_ones() as usize) < self.degree {
                let sum: f64 = (0..self.n).map(|i| self.moment(s | (1u128 << i))).sum();
                worst = worst.max((sum - self.k as f64 * v).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone)]
pub struct SosOptions {
    pub solve: SolveOptions,
    pub row_budget: usize,
}

impl Default for SosOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions {
                tol_primal: 1e-6,
                tol_dual: 1e-6,
                max_iter: 5000,
                ..SolveOptions::default()
            },
            row_budget: DEFAULT_ROW_BUDGET,
        }
    }
}

/// Solves the degree-`d` relaxation minimizing `‖Ẽ[w]‖²`.
pub fn minimize_mean_norm(g: &Graph, k: usize, d: usize) -> Result<PseudoDistribution, SosError> {
    minimize_mean_norm_with(g, k, d, &SosOptions::default())
}

pub fn minimize_mean_norm_with(
    g: &Graph,
    k: usize,
    d: usize,
    options: &SosOptions,
) -> Result<PseudoDistribution, SosError> {
    let relax = build_clique_relaxation_with_budget(g, k, d, options.row_budget)?;
    let sol = sdp::solve(&relax.problem, &options.solve);
    if sol.status == SolveStatus::InfeasibleCertified {
        return Err(SosError::Infeasible(
            sol.infeasibility_reason
                .unwrap_or_else(|| "solver certificate".into()),
        ));
    }
    let moments = relax
        .vars
        .iter()
        .zip(&sol.vars)
        .filter(|(&m, _)| m == 0 || !relax.problem.is_fixed_zero(relax.var_index[&m]))
        .map(|(&m, &v)| (m, v))
        .collect();
    let eta = sol
        .equality_residual
        .max(sol.box_violation)
        .max((-sol.min_eigenvalue).max(0.0));
    let dist = PseudoDistribution {
        degree: d,
        n: g.n(),
        k,
        moments,
        eta,
        objective: sol.objective_value,
        converged: sol.status == SolveStatus::Converged,
    };
    if dist.converged {
        Ok(dist)
    } else {
        Err(SosError::NotConverged {
            partial: Box::new(dist),
        })
    }
}
