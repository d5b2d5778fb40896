//! Refutation certificates for unbalanced bicliques of total size `k`.
//!
//! A certificate states that a bipartite graph `H` has no `s × (k − s)`
//! biclique with `k − s ≥ 1` for every `s` at or above its `certified_bound`.
//! Three kinds are offered:
//!
//! * spectral: `|x|·|y| ≤ (p/(1−p))·σ_max(H_p)²` for every biclique `(x, y)`;
//! * geometric: measured balancedness of character products plus the maximum
//!   right degree give `C(|x|, r)⁴ ≤ |V|·C⁴` whenever a slack condition holds;
//! * degree-2 SDP: infeasibility of the basic relaxation for every large `ℓ`.
//!
//! Every witness is a measured quantity, so [`BicliqueCertificate::verify`]
//! recomputes it from `H` alone.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitSet;
use crate::graphs::BipartiteGraph;
use crate::sdp::{self, SdpProblem, SolveOptions, SolveStatus};

/// Largest number of subsets a balancedness enumeration may visit.
pub const SUBSET_BUDGET: u128 = 50_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum CertifyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("enumeration of {0} subsets exceeds the budget")]
    Budget(u128),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalancednessReport {
    pub r: usize,
    /// Max of `|Σ_j u_S(j)|` over nonempty `S` with `|S| ≤ r` in the ±1 view.
    pub delta_r: f64,
    /// Max of `|Σ_j u_{p,S}(j)·u_{p,T}(j)|` over `S ≠ T` with `|S|, |T| ≤ r`.
    pub delta_2r_p: Option<f64>,
    pub p: Option<f64>,
    pub max_right_degree: usize,
}

fn binom_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

fn subsets_up_to(n: usize, r: usize) -> u128 {
    (1..=r.min(n)).fold(0u128, |acc, i| acc.saturating_add(binom_u128(n, i)))
}

/// `Δ_r` in the ±1 view, computed by XOR-ing non-edge rows along a subset DFS.
fn delta_pm(h: &BipartiteGraph, r: usize) -> Result<f64, CertifyError> {
    let k = h.left_size();
    let m = h.right_size();
    let r = r.min(k);
    let count = subsets_up_to(k, r);
    if count > SUBSET_BUDGET {
        return Err(CertifyError::Budget(count));
    }
    let full = BitSet::full(m);
    let non_edges: Vec<BitSet> = h
        .left_rows()
        .iter()
        .map(|row| {
            let mut ne = full.clone();
            ne.xor_with(row);
            ne
        })
        .collect();
    fn rec(ne: &[BitSet], m: usize, start: usize, left: usize, parity: &BitSet, best: &mut i64) {
        for i in start..ne.len() {
            let mut next = parity.clone();
            next.xor_with(&ne[i]);
            let sum = m as i64 - 2 * next.count() as i64;
            *best = (*best).max(sum.abs());
            if left > 1 {
                rec(ne, m, i + 1, left - 1, &next, best);
            }
        }
    }
    let mut best = 0i64;
    if r > 0 {
        rec(&non_edges, m, 0, r, &BitSet::new(m), &mut best);
    }
    Ok(best as f64)
}

/// Max `|Σ_j u_{p,S}(j)·u_{p,T}(j)|` over `S ≠ T`, `|S|, |T| ≤ r`.
///
/// The product depends only on `A = S ∩ T` (squared characters) and the
/// nonempty `B = S Δ T`; a split of `B` exists iff `|B| ≤ 2(r − |A|)`.
pub fn p_balancedness(h: &BipartiteGraph, r: usize, p: f64) -> Result<f64, CertifyError> {
    check_density(p)?;
    let k = h.left_size();
    let m = h.right_size();
    let mut count: u128 = 0;
    for a in 0..r.min(k + 1) {
        let outer = binom_u128(k, a);
        count = count.saturating_add(outer.saturating_mul(subsets_up_to(k - a, 2 * (r - a))));
    }
    if count.saturating_mul(m.max(1) as u128) > SUBSET_BUDGET.saturating_mul(20) {
        return Err(CertifyError::Budget(count));
    }
    let on = crate::graphs::p_biased_value(true, p);
    let off = crate::graphs::p_biased_value(false, p);
    let rows = h.left_rows();
    let chars: Vec<Vec<f64>> = rows
        .iter()
        .map(|row| {
            (0..m)
                .map(|j| if row.contains(j) { on } else { off })
                .collect()
        })
        .collect();

    struct Ctx<'a> {
        chars: &'a [Vec<f64>],
        r: usize,
        best: f64,
    }
    fn rec_b(ctx: &mut Ctx, in_a: &[bool], start: usize, left: usize, prod: &[f64]) {
        for i in start..ctx.chars.len() {
            if in_a[i] {
                continue;
            }
            let next: Vec<f64> = prod.iter().zip(&ctx.chars[i]).map(|(a, b)| a * b).collect();
            let sum: f64 = next.iter().sum();
            ctx.best = ctx.best.max(sum.abs());
            if left > 1 {
                rec_b(ctx, in_a, i + 1, left - 1, &next);
            }
        }
    }
    fn rec_a(ctx: &mut Ctx, in_a: &mut Vec<bool>, start: usize, size: usize, prod: &[f64]) {
        let budget = 2 * (ctx.r - size);
        rec_b(ctx, in_a, 0, budget, prod);
        if size + 1 >= ctx.r {
            return;
        }
        for i in start..ctx.chars.len() {
            let next: Vec<f64> = prod
                .iter()
                .zip(&ctx.chars[i])
                .map(|(a, b)| a * b * b)
                .collect();
            in_a[i] = true;
            rec_a(ctx, in_a, i + 1, size + 1, &next);
            in_a[i] = false;
        }
    }
    let mut ctx = Ctx {
        chars: &chars,
        r,
        best: 0.0,
    };
    if r > 0 {
        rec_a(&mut ctx, &mut vec![false; k], 0, 0, &vec![1.0; m]);
    }
    Ok(ctx.best)
}

fn check_density(p: f64) -> Result<(), CertifyError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(CertifyError::InvalidParameter(format!(
            "density {p} must lie in (0, 1)"
        )))
    }
}

/// Exact `Δ_r` (and optionally the `p`-biased `Δ_2r`) with the maximum right degree.
pub fn balancedness(
    h: &BipartiteGraph,
    r: usize,
    p: Option<f64>,
) -> Result<BalancednessReport, CertifyError> {
    if r > h.left_size() {
        return Err(CertifyError::InvalidParameter(format!(
            "fold {r} exceeds left size {}",
            h.left_size()
        )));
    }
    let delta_2r_p = p.map(|p| p_balancedness(h, r, p)).transpose()?;
    Ok(BalancednessReport {
        r,
        delta_r: delta_pm(h, r)?,
        delta_2r_p,
        p,
        max_right_degree: h.max_right_degree(),
    })
}

/// Largest singular value of `M`, from the eigenvalues of the smaller Gram matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = if m.nrows() <= m.ncols() {
        m * m.transpose()
    } else {
        m.transpose() * m
    };
    let top = crate::sdp::symmetric_eigen(&gram)
        .0
        .iter()
        .copied()
        .fold(0.0, f64::max);
    top.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    Spectral,
    Geometric,
    Degree2Sdp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpDiagnostics {
    pub l: usize,
    pub outcome: String,
    pub iterations: usize,
    pub primal_residual: f64,
    pub equality_residual: f64,
    pub box_violation: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicliqueCertificate {
    pub kind: CertificateKind,
    pub k: usize,
    pub p: f64,
    pub r: Option<usize>,
    pub left_size: usize,
    pub right_size: usize,
    pub max_right_degree: usize,
    /// `σ_max(H_p)` (spectral).
    pub spectral_norm: Option<f64>,
    /// `(p/(1−p))·σ²` (spectral).
    pub product_bound: Option<f64>,
    /// `Δ_2r` used in the slack condition (geometric).
    pub delta_2r: Option<f64>,
    /// `max(0, max_right_degree − k·p)` (geometric).
    pub delta_l: Option<f64>,
    /// Left and right sides of the slack condition (geometric).
    pub precondition: Option<(f64, f64)>,
    /// `|V|^{1/4}·C`, the cap on `C(|x|, r)` (geometric).
    pub binomial_cap: Option<f64>,
    /// `log10` of the asymptotic reference bound on `|x|^{4r}·|y|` (geometric).
    pub headline_log10: Option<f64>,
    pub sdp: Option<Vec<SdpDiagnostics>>,
    pub certified_bound: Option<usize>,
    pub applicable: bool,
}

impl BicliqueCertificate {
    fn blank(kind: CertificateKind, h: &BipartiteGraph, k: usize, p: f64) -> Self {
        Self {
            kind,
            k,
            p,
            r: None,
            left_size: h.left_size(),
            right_size: h.right_size(),
            max_right_degree: h.max_right_degree(),
            spectral_norm: None,
            product_bound: None,
            delta_2r: None,
            delta_l: None,
            precondition: None,
            binomial_cap: None,
            headline_log10: None,
            sdp: None,
            certified_bound: None,
            applicable: false,
        }
    }

    /// Whether a biclique with `l` left and `k − l ≥ 1` right vertices is ruled out.
    pub fn excludes(&self, l: usize) -> bool {
        self.applicable && self.certified_bound.is_some_and(|s| l >= s && l < self.k)
    }

    /// Recomputes every witness from `H` and compares bit for bit.
    pub fn verify(&self, h: &BipartiteGraph, sdp_options: &SolveOptions) -> bool {
        let again = match self.kind {
            CertificateKind::Spectral => spectral_bound(h, self.k, self.p),
            CertificateKind::Geometric => match self.r {
                Some(r) => geometric_bound(h, self.k, self.p, r),
                None => return false,
            },
            CertificateKind::Degree2Sdp => sdp_certificate(h, self.k, sdp_options),
        };
        again.is_ok_and(|c| &c == self)
    }
}

/// Spectral certificate `|x||y| ≤ (p/(1−p))·σ_max(H_p)²`, resolved into a bound on
/// `|x|` with the help of the right-degree bound `|x| ≤ max_right_degree`.
pub fn spectral_bound(
    h: &BipartiteGraph,
    k: usize,
    p: f64,
) -> Result<BicliqueCertificate, CertifyError> {
    check_density(p)?;
    let sigma = spectral_norm(&h.p_biased_matrix(p));
    let product = p / (1.0 - p) * sigma * sigma;
    let mut cert = BicliqueCertificate::blank(CertificateKind::Spectral, h, k, p);
    cert.spectral_norm = Some(sigma);
    cert.product_bound = Some(product);
    let maxdeg = cert.max_right_degree;
    // Small relative slack keeps round-off from excluding a tight biclique.
    let excluded_by_product = |l: usize| (l * (k - l)) as f64 > product * (1.0 + 1e-9) + 1e-9;
    let s_low = (1..k).find(|&s| excluded_by_product(s));
    if let Some(s) = s_low {
        if (s..k).all(|l| excluded_by_product(l) || l > maxdeg) {
            cert.certified_bound = Some(s);
            cert.applicable = true;
        }
    }
    Ok(cert)
}

fn binom_f64(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `C = 2n·M^r·p^r / (k(1−p)^{r+1})` with `M = max{p/(1−p), (1−p)/p}`.
fn geometric_constant(n: f64, k: usize, p: f64, r: usize) -> f64 {
    let q = 1.0 - p;
    let big = (p / q).max(q / p);
    2.0 * n * big.powi(r as i32) * p.powi(r as i32) / (k as f64 * q.powi(r as i32 + 1))
}

/// `log10` of the asymptotic reference bound on `|x|^{4r}·|y|`: `(1000r)^{10r}·n·(n/k)⁴`
/// at `p = ½` and `(1000r)^{10r}·n·(n·M^r·p^r/(k(1−p)^{r+1}))⁴` otherwise.
pub fn headline_bound_log10(r: usize, n: usize, k: usize, p: f64) -> f64 {
    let ratio = if p == 0.5 {
        n as f64 / k as f64
    } else {
        geometric_constant(n as f64, k, p, r) / 2.0
    };
    10.0 * r as f64 * (1000.0 * r as f64).log10() + (n as f64).log10() + 4.0 * ratio.log10()
}

pub fn headline_bound(r: usize, n: usize, k: usize, p: f64) -> f64 {
    10f64.powf(headline_bound_log10(r, n, k, p))
}

/// Geometric certificate built from measured `Δ_2r` and maximum right degree.
///
/// At `p = ½` the ±1 balancedness at fold `2r` is used; otherwise the
/// `p`-biased pair balancedness. When the slack condition
/// `(k(1−p) − Δ_ℓ)((1−p)/p)^r − Δ_2r ≥ (k/2)(1−p)^{r+1}/p^r` holds, every biclique
/// with `|y| ≥ 1` obeys `C(|x|, r)⁴ ≤ |V|·C⁴`.
pub fn geometric_bound(
    h: &BipartiteGraph,
    k: usize,
    p: f64,
    r: usize,
) -> Result<BicliqueCertificate, CertifyError> {
    check_density(p)?;
    if r == 0 || k == 0 {
        return Err(CertifyError::InvalidParameter(
            "need r >= 1 and k >= 1".into(),
        ));
    }
    let delta = if p == 0.5 {
        delta_pm(h, 2 * r)?
    } else {
        p_balancedness(h, r, p)?
    };
    let mut cert = BicliqueCertificate::blank(CertificateKind::Geometric, h, k, p);
    let q = 1.0 - p;
    let delta_l = (cert.max_right_degree as f64 - k as f64 * p).max(0.0);
    let ratio = (q / p).powi(r as i32);
    let lhs = (k as f64 * q - delta_l) * ratio - delta;
    let rhs = k as f64 / 2.0 * q.powi(r as i32 + 1) / p.powi(r as i32);
    let n_right = h.right_size() as f64;
    let cap = n_right.powf(0.25) * geometric_constant(n_right, k, p, r);
    cert.r = Some(r);
    cert.delta_2r = Some(delta);
    cert.delta_l = Some(delta_l);
    cert.precondition = Some((lhs, rhs));
    cert.binomial_cap = Some(cap);
    cert.headline_log10 = Some(headline_bound_log10(
        r,
        h.left_size() + h.right_size(),
        k,
        p,
    ));
    if lhs >= rhs {
        let holds = |l: usize| binom_f64(l, r) <= cap * (1.0 + 1e-9);
        let max_ok = (0..k).rev().find(|&l| holds(l)).unwrap_or(0);
        cert.certified_bound = Some(max_ok + 1);
        cert.applicable = true;
    }
    Ok(cert)
}

#[derive(Debug, Clone)]
pub enum SdpFeasibility {
    Feasible(DMatrix<f64>),
    Infeasible(String),
    Unknown(SdpDiagnostics),
}

impl SdpFeasibility {
    pub fn label(&self) -> &'static str {
        match self {
            SdpFeasibility::Feasible(_) => "feasible",
            SdpFeasibility::Infeasible(_) => "infeasible",
            SdpFeasibility::Unknown(_) => "unknown",
        }
    }
}

/// Tolerance on residuals, box violation and negative eigenvalues for a `Feasible` verdict.
pub const FEASIBLE_TOL: f64 = 1e-5;

/// The basic degree-2 relaxation for an `ℓ × (k − ℓ)` biclique, over the
/// `(left + right)`-dimensional matrix with left vertices first.
pub fn biclique_sdp_problem(h: &BipartiteGraph, k: usize, l: usize) -> SdpProblem {
    let (a, b) = (h.left_size(), h.right_size());
    let dim = a + b;
    let mut prob = SdpProblem::dense(dim);
    prob.set_all_bounds(0.0, 1.0);
    let diag_all: Vec<(usize, usize, f64)> = (0..dim).map(|i| (i, i, 1.0)).collect();
    prob.add_entry_constraint(&diag_all, k as f64);
    let diag_left: Vec<(usize, usize, f64)> = (0..a).map(|i| (i, i, 1.0)).collect();
    prob.add_entry_constraint(&diag_left, l as f64);
    let diag_right: Vec<(usize, usize, f64)> = (a..dim).map(|i| (i, i, 1.0)).collect();
    prob.add_entry_constraint(&diag_right, (k - l) as f64);
    let cross: Vec<(usize, usize, f64)> = (0..a)
        .flat_map(|u| (0..b).map(move |v| (u, a + v, 1.0)))
        .collect();
    prob.add_entry_constraint(&cross, (l * (k - l)) as f64);
    let rows = h.left_rows();
    for u in 0..a {
        for v in 0..b {
            if !rows[u].contains(v) {
                prob.fix_zero_entry(u, a + v);
            }
        }
    }
    prob
}

/// Linear contradictions visible without solving.
fn presolve_contradiction(h: &BipartiteGraph, k: usize, l: usize) -> Option<String> {
    if l > h.left_size() {
        return Some(format!(
            "left trace {l} exceeds left size {}",
            h.left_size()
        ));
    }
    if k - l > h.right_size() {
        return Some(format!(
            "right trace {} exceeds right size {}",
            k - l,
            h.right_size()
        ));
    }
    let need = l * (k - l);
    if need > h.edge_count() {
        return Some(format!(
            "cross sum {need} exceeds the {} cross entries allowed to be nonzero",
            h.edge_count()
        ));
    }
    None
}

#[derive(Debug, Clone)]
pub struct FeasibilityOptions {
    pub solve: SolveOptions,
    /// Start the solver from this matrix when given.
    pub warm_start: Option<DMatrix<f64>>,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions {
                tol_primal: 1e-6,
                tol_dual: 1e-6,
                max_iter: 5000,
                ..SolveOptions::default()
            },
            warm_start: None,
        }
    }
}

pub fn sdp_biclique_feasibility(
    h: &BipartiteGraph,
    k: usize,
    l: usize,
    options: &FeasibilityOptions,
) -> Result<SdpFeasibility, CertifyError> {
    if l > k {
        return Err(CertifyError::InvalidParameter(format!(
            "l = {l} exceeds k = {k}"
        )));
    }
    if let Some(reason) = presolve_contradiction(h, k, l) {
        return Ok(SdpFeasibility::Infeasible(reason));
    }
    let (a, b) = (h.left_size(), h.right_size());
    if l == 0 {
        let mut x = DMatrix::zeros(a + b, a + b);
        for v in 0..b {
            x[(a + v, a + v)] = k as f64 / b as f64;
        }
        return Ok(SdpFeasibility::Feasible(x));
    }
    let prob = biclique_sdp_problem(h, k, l);
    let mut opts = options.solve.clone();
    opts.warm_start = options.warm_start.clone();
    let sol = sdp::solve(&prob, &opts);
    let diag = SdpDiagnostics {
        l,
        outcome: format!("{:?}", sol.status),
        iterations: sol.iterations,
        primal_residual: sol.primal_residual,
        equality_residual: sol.equality_residual,
        box_violation: sol.box_violation,
        min_eigenvalue: sol.min_eigenvalue,
    };
    Ok(match sol.status {
        SolveStatus::InfeasibleCertified => SdpFeasibility::Infeasible(
            sol.infeasibility_reason
                .unwrap_or_else(|| "solver certificate".into()),
        ),
        SolveStatus::Converged
            if sol.equality_residual <= FEASIBLE_TOL
                && sol.box_violation <= FEASIBLE_TOL
                && sol.min_eigenvalue >= -FEASIBLE_TOL =>
        {
            SdpFeasibility::Feasible(sol.x)
        }
        _ => SdpFeasibility::Unknown(diag),
    })
}

/// Degree-2 certificate: the smallest `s` such that the relaxation is
/// infeasible for every `ℓ` in `s..k`.
pub fn sdp_certificate(
    h: &BipartiteGraph,
    k: usize,
    options: &SolveOptions,
) -> Result<BicliqueCertificate, CertifyError> {
    let mut cert = BicliqueCertificate::blank(CertificateKind::Degree2Sdp, h, k, 0.5);
    let mut diags = Vec::new();
    let mut lowest = None;
    let fopts = FeasibilityOptions {
        solve: options.clone(),
        warm_start: None,
    };
    for l in (1..k).rev() {
        let outcome = sdp_biclique_feasibility(h, k, l, &fopts)?;
        let (label, d) = match &outcome {
            SdpFeasibility::Unknown(d) => ("unknown", Some(d.clone())),
            other => (other.label(), None),
        };
        diags.push(d.unwrap_or(SdpDiagnostics {
            l,
            outcome: label.into(),
            iterations: 0,
            primal_residual: 0.0,
            equality_residual: 0.0,
            box_violation: 0.0,
            min_eigenvalue: 0.0,
        }));
        if matches!(outcome, SdpFeasibility::Infeasible(_)) {
            lowest = Some(l);
        } else {
            break;
        }
    }
    cert.sdp = Some(diags);
    cert.certified_bound = lowest;
    cert.applicable = lowest.is_some();
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub k: usize,
    pub n: usize,
    pub l: usize,
    pub c1: f64,
    pub trace_residual: f64,
    pub left_trace_residual: f64,
    pub right_trace_residual: f64,
    pub cross_sum_residual: f64,
    /// Largest `|X(u, v)|` over cross non-edges.
    pub non_edge_residual: f64,
    /// Largest violation of `0 ≤ X(i, j) ≤ 1`.
    pub entry_violation: f64,
    pub min_entry: f64,
    pub max_entry: f64,
    pub min_eigenvalue: f64,
}

impl ConstructionReport {
    /// Largest residual over the linear equalities.
    pub fn linear_residual(&self) -> f64 {
        [
            self.trace_residual,
            self.left_trace_residual,
            self.right_trace_residual,
            self.cross_sum_residual,
            self.non_edge_residual,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Which right block to use in the explicit solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BottomBlock {
    /// `((k−ℓ)/(n(k+1)))·(Σ a_i a_iᵀ + 𝟙𝟙ᵀ)`, exactly as in the lower-bound argument.
    Literal,
    /// `((k−ℓ)/(2kn))·(Σ a_i a_iᵀ + k·𝟙𝟙ᵀ)`: same diagonal, entrywise non-negative.
    Shifted,
}

/// The explicit lower-bound solution for `H` with `k` left and `n` right vertices.
pub fn sdp_lb_construction(
    h: &BipartiteGraph,
    k: usize,
    l: usize,
) -> Result<(DMatrix<f64>, ConstructionReport), CertifyError> {
    sdp_lb_construction_with(h, k, l, BottomBlock::Literal)
}

pub fn sdp_lb_construction_with(
    h: &BipartiteGraph,
    k: usize,
    l: usize,
    bottom: BottomBlock,
) -> Result<(DMatrix<f64>, ConstructionReport), CertifyError> {
    if h.left_size() != k {
        return Err(CertifyError::InvalidParameter(format!(
            "left size {} differs from k = {k}",
            h.left_size()
        )));
    }
    if l > k {
        return Err(CertifyError::InvalidParameter(format!(
            "l = {l} exceeds k = {k}"
        )));
    }
    let n = h.right_size();
    let edges = h.edge_count();
    if edges == 0 || n == 0 {
        return Err(CertifyError::Degenerate(
            "no cross edges, c1 is undefined".into(),
        ));
    }
    let (kf, nf, lf) = (k as f64, n as f64, l as f64);
    let c1 = (kf - lf) * nf / edges as f64;
    let dim = k + n;
    let mut x = DMatrix::zeros(dim, dim);
    for i in 0..k {
        for j in 0..k {
            x[(i, j)] = if i == j {
                lf / kf
            } else {
                (lf / kf) * (lf / kf)
            };
        }
    }
    let rows = h.left_rows();
    let cross = c1 * lf / nf;
    for u in 0..k {
        for v in rows[u].iter() {
            x[(u, k + v)] = cross;
            x[(k + v, u)] = cross;
        }
    }
    let signed = DMatrix::from_fn(k, n, |u, v| if rows[u].contains(v) { 1.0 } else { -1.0 });
    let gram = signed.transpose() * &signed;
    let (scale, ones_weight) = match bottom {
        BottomBlock::Literal => ((kf - lf) / (nf * (kf + 1.0)), 1.0),
        BottomBlock::Shifted => ((kf - lf) / (2.0 * kf * nf), kf),
    };
    for v in 0..n {
        for w in 0..n {
            x[(k + v, k + w)] = scale * (gram[(v, w)] + ones_weight);
        }
    }

    let trace: f64 = (0..dim).map(|i| x[(i, i)]).sum();
    let left: f64 = (0..k).map(|i| x[(i, i)]).sum();
    let right: f64 = (k..dim).map(|i| x[(i, i)]).sum();
    let cross_sum: f64 = (0..k)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .map(|(u, v)| x[(u, k + v)])
        .sum();
    let mut non_edge: f64 = 0.0;
    for u in 0..k {
        for v in 0..n {
            if !rows[u].contains(v) {
                non_edge = non_edge.max(x[(u, k + v)].abs());
            }
        }
    }
    let min_entry = x.iter().copied().fold(f64::INFINITY, f64::min);
    let max_entry = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let report = ConstructionReport {
        k,
        n,
        l,
        c1,
        trace_residual: (trace - kf).abs(),
        left_trace_residual: (left - lf).abs(),
        right_trace_residual: (right - (kf - lf)).abs(),
        cross_sum_residual: (cross_sum - lf * (kf - lf)).abs(),
        non_edge_residual: non_edge,
        entry_violation: (-min_entry).max(max_entry - 1.0).max(0.0),
        min_entry,
        max_entry,
        min_eigenvalue: sdp::min_eigenvalue(&x),
    };
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balancedness_examples() {
        let full = BipartiteGraph::complete(3, 7);
        assert_eq!(balancedness(&full, 1, None).unwrap().delta_r, 7.0);
        let single = BipartiteGraph::new(2, 2, [(0, 0)]).unwrap();
        let rep = balancedness(&single, 2, Some(0.5)).unwrap();
        assert_eq!(rep.delta_r, 2.0);
        assert_eq!(rep.max_right_degree, 1);
        assert!(balancedness(&single, 3, None).is_err());
    }

    #[test]
    fn p_balancedness_matches_pm_view_at_half() {
        let h = crate::graphs::sample_er_bipartite(6, 40, 0.5, 4).unwrap();
        for r in 1..=2 {
            let pm = delta_pm(&h, 2 * r).unwrap();
            let pb = p_balancedness(&h, r, 0.5).unwrap();
            assert!((pm - pb).abs() < 1e-9, "r={r}: {pm} vs {pb}");
        }
    }

    #[test]
    fn p_balancedness_brute_force_pairs() {
        let h = crate::graphs::sample_er_bipartite(4, 9, 0.3, 8).unwrap();
        let p = 0.3;
        let hp = h.p_biased_matrix(p);
        let r = 2;
        let subsets: Vec<Vec<usize>> = (0u32..16)
            .filter(|m| m.count_ones() as usize <= r)
            .map(|m| (0..4).filter(|i| m >> i & 1 == 1).collect())
            .collect();
        let mut best: f64 = 0.0;
        for s in &subsets {
            for t in &subsets {
                if s == t {
                    continue;
                }
                let sum: f64 = (0..9)
                    .map(|j| {
                        s.iter().map(|&i| hp[(i, j)]).product::<f64>()
                            * t.iter().map(|&i| hp[(i, j)]).product::<f64>()
                    })
                    .sum();
                best = best.max(sum.abs());
            }
        }
        let got = p_balancedness(&h, r, p).unwrap();
        assert!((got - best).abs() < 1e-9, "{got} vs {best}");
    }

    #[test]
    fn spectral_examples() {
        let ones = BipartiteGraph::complete(2, 3);
        let c = spectral_bound(&ones, 5, 0.5).unwrap();
        assert!((c.product_bound.unwrap() - 6.0).abs() < 1e-12);
        let one = BipartiteGraph::complete(1, 1);
        let c = spectral_bound(&one, 2, 0.5).unwrap();
        assert!((c.spectral_norm.unwrap() - 1.0).abs() < 1e-12);
        assert!((c.product_bound.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn geometric_complete_graph_not_applicable() {
        let h = BipartiteGraph::complete(6, 30);
        for r in 1..=2 {
            let c = geometric_bound(&h, 6, 0.5, r).unwrap();
            assert!(!c.applicable);
            assert_eq!(c.certified_bound, None);
            assert_eq!(c.delta_2r, Some(30.0));
        }
    }

    #[test]
    fn headline_reference_value() {
        let v = headline_bound(1, 1000, 500, 0.5);
        assert!((v / 1.6e34 - 1.0).abs() < 1e-9, "{v:e}");
    }

    #[test]
    fn construction_top_block_and_trace() {
        let h = crate::graphs::sample_er_bipartite(4, 8, 0.5, 1).unwrap();
        let (x, rep) = sdp_lb_construction(&h, 4, 1).unwrap();
        assert_eq!(x[(0, 0)], 0.25);
        assert_eq!(x[(0, 1)], 0.0625);
        assert!(rep.right_trace_residual < 1e-12);
        for v in 4..12 {
            assert!((x[(v, v)] - 3.0 / 8.0).abs() < 1e-12);
        }
        assert!(sdp_lb_construction(&BipartiteGraph::empty(4, 8), 4, 1).is_err());
    }

    #[test]
    fn shifted_bottom_block_is_nonnegative() {
        let h = crate::graphs::sample_er_bipartite(8, 40, 0.5, 2).unwrap();
        let (_, rep) = sdp_lb_construction_with(&h, 8, 1, BottomBlock::Shifted).unwrap();
        assert!(rep.min_entry >= 0.0);
        assert!(rep.linear_residual() < 1e-9);
    }

    #[test]
    fn feasibility_closed_forms() {
        let h = crate::graphs::sample_er_bipartite(3, 6, 0.5, 3).unwrap();
        let opts = FeasibilityOptions::default();
        match sdp_biclique_feasibility(&h, 4, 0, &opts).unwrap() {
            SdpFeasibility::Feasible(x) => {
                assert!((x[(3, 3)] - 4.0 / 6.0).abs() < 1e-12);
                assert_eq!(x[(0, 0)], 0.0);
            }
            other => panic!("{other:?}"),
        }
        let empty = BipartiteGraph::empty(3, 6);
        assert!(matches!(
            sdp_biclique_feasibility(&empty, 4, 2, &opts).unwrap(),
            SdpFeasibility::Infeasible(_)
        ));
    }

    #[test]
    fn feasibility_on_complete_graph() {
        let h = BipartiteGraph::complete(3, 4);
        let opts = FeasibilityOptions::default();
        for l in 1..=3 {
            let out = sdp_biclique_feasibility(&h, 5, l, &opts).unwrap();
            assert!(matches!(out, SdpFeasibility::Feasible(_)), "l={l}: {out:?}");
        }
    }
}
