//! ADMM solver for semidefinite programs over a parameterized matrix variable.
//!
//! The matrix `X = M(y)` is described by scalar variables `y`: every entry of
//! the upper triangle maps to one variable or to a structural zero, so tied
//! entries (as in moment matrices) share a variable. Problems carry affine
//! equalities `Ay = b`, per-variable boxes and either no objective, a linear
//! objective or a squared-norm objective `‖Ly‖²`.
//!
//! The iteration splits `y` (affine constraints and objective, solved exactly
//! through a cached factorization), a PSD copy `Z` of `M(y)` (eigenvalue
//! clamping) and a box copy of the bounded variables (clamping).

use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Objective {
    Feasibility,
    /// Minimize `Σ c_v y_v`.
    Linear(Vec<(usize, f64)>),
    /// Minimize `‖L y‖²`, one sparse row of `L` per entry.
    SquaredNorm(Vec<Vec<(usize, f64)>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    dim: usize,
    num_vars: usize,
    entry_var: Vec<Option<usize>>,
    constraints: Vec<LinearConstraint>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    fixed_zero: Vec<bool>,
    objective: Objective,
}

#[inline]
fn tri(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    j * (j + 1) / 2 + i
}

impl SdpProblem {
    /// One variable per upper-triangular entry.
    pub fn dense(dim: usize) -> Self {
        let num_vars = dim * (dim + 1) / 2;
        Self {
            dim,
            num_vars,
            entry_var: (0..num_vars).map(Some).collect(),
            constraints: Vec::new(),
            lower: vec![f64::NEG_INFINITY; num_vars],
            upper: vec![f64::INFINITY; num_vars],
            fixed_zero: vec![false; num_vars],
            objective: Objective::Feasibility,
        }
    }

    /// Variables given by `var_of(i, j)` for `i ≤ j`; `None` marks a structural zero.
    pub fn from_entry_map(
        dim: usize,
        num_vars: usize,
        var_of: impl Fn(usize, usize) -> Option<usize>,
    ) -> Self {
        let mut entry_var = vec![None; dim * (dim + 1) / 2];
        for j in 0..dim {
            for i in 0..=j {
                let v = var_of(i, j);
                if let Some(v) = v {
                    assert!(v < num_vars, "variable {v} out of range");
                }
                entry_var[tri(i, j)] = v;
            }
        }
        Self {
            dim,
            num_vars,
            entry_var,
            constraints: Vec::new(),
            lower: vec![f64::NEG_INFINITY; num_vars],
            upper: vec![f64::INFINITY; num_vars],
            fixed_zero: vec![false; num_vars],
            objective: Objective::Feasibility,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn bounds(&self, v: usize) -> (f64, f64) {
        (self.lower[v], self.upper[v])
    }

    pub fn is_fixed_zero(&self, v: usize) -> bool {
        self.fixed_zero[v]
    }

    pub fn var_of(&self, i: usize, j: usize) -> Option<usize> {
        self.entry_var[tri(i, j)]
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        assert!(coeffs.iter().all(|&(v, _)| v < self.num_vars));
        self.constraints.push(LinearConstraint { coeffs, rhs });
    }

    /// Adds `Σ c · X(i, j) = rhs`; each listed entry is counted once.
    pub fn add_entry_constraint(&mut self, entries: &[(usize, usize, f64)], rhs: f64) {
        let coeffs = entries
            .iter()
            .filter_map(|&(i, j, c)| self.var_of(i, j).map(|v| (v, c)))
            .collect();
        self.add_constraint(coeffs, rhs);
    }

    pub fn fix_zero_var(&mut self, v: usize) {
        self.fixed_zero[v] = true;
    }

    pub fn fix_zero_entry(&mut self, i: usize, j: usize) {
        if let Some(v) = self.var_of(i, j) {
            self.fixed_zero[v] = true;
        }
    }

    pub fn set_bounds(&mut self, v: usize, lower: f64, upper: f64) {
        self.lower[v] = lower;
        self.upper[v] = upper;
    }

    pub fn set_all_bounds(&mut self, lower: f64, upper: f64) {
        self.lower.fill(lower);
        self.upper.fill(upper);
    }

    pub fn set_objective(&mut self, objective: Objective) {
        self.objective = objective;
    }

    /// Linear objective `⟨C, X⟩` for a symmetric `C`.
    pub fn set_matrix_objective(&mut self, c: &DMatrix<f64>) {
        let mut coeff = vec![0.0; self.num_vars];
        for j in 0..self.dim {
            for i in 0..=j {
                if let Some(v) = self.var_of(i, j) {
                    coeff[v] += if i == j {
                        c[(i, i)]
                    } else {
                        c[(i, j)] + c[(j, i)]
                    };
                }
            }
        }
        let coeffs = coeff
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c != 0.0)
            .collect();
        self.objective = Objective::Linear(coeffs);
    }

    /// `M(y)`.
    pub fn matrix_from_vars(&self, y: &[f64]) -> DMatrix<f64> {
        let mut x = DMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            for i in 0..=j {
                if let Some(v) = self.var_of(i, j) {
                    x[(i, j)] = y[v];
                    x[(j, i)] = y[v];
                }
            }
        }
        x
    }

    /// Reads variables back from a matrix, averaging tied entries.
    pub fn vars_from_matrix(&self, x: &DMatrix<f64>) -> Vec<f64> {
        let mut sum = vec![0.0; self.num_vars];
        let mut count = vec![0usize; self.num_vars];
        for j in 0..self.dim {
            for i in 0..=j {
                if let Some(v) = self.var_of(i, j) {
                    sum[v] += 0.5 * (x[(i, j)] + x[(j, i)]);
                    count[v] += 1;
                }
            }
        }
        sum.iter()
            .zip(&count)
            .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
            .collect()
    }

    pub fn objective_value(&self, y: &[f64]) -> f64 {
        match &self.objective {
            Objective::Feasibility => 0.0,
            Objective::Linear(c) => c.iter().map(|&(v, a)| a * y[v]).sum(),
            Objective::SquaredNorm(rows) => rows
                .iter()
                .map(|r| r.iter().map(|&(v, a)| a * y[v]).sum::<f64>().powi(2))
                .sum(),
        }
    }

    /// Largest `|a·y − b|` over the equality constraints.
    pub fn equality_residual(&self, y: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| (c.coeffs.iter().map(|&(v, a)| a * y[v]).sum::<f64>() - c.rhs).abs())
            .fold(0.0, f64::max)
    }

    /// Largest violation of a box or a fixed zero.
    pub fn box_violation(&self, y: &[f64]) -> f64 {
        (0..self.num_vars)
            .map(|v| {
                let b = (self.lower[v] - y[v]).max(y[v] - self.upper[v]).max(0.0);
                if self.fixed_zero[v] {
                    b.max(y[v].abs())
                } else {
                    b
                }
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol_primal: f64,
    pub tol_dual: f64,
    pub max_iter: usize,
    pub rho: f64,
    /// Over-relaxation factor in `(0, 2)`.
    pub alpha: f64,
    pub adaptive_rho: bool,
    /// Iterations between improving-ray checks; 0 disables them.
    pub infeasibility_check_every: usize,
    pub infeasibility_margin: f64,
    /// Emit one JSON line per reporting interval on stderr.
    pub verbose: bool,
    #[serde(skip)]
    pub warm_start: Option<DMatrix<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol_primal: 1e-6,
            tol_dual: 1e-6,
            max_iter: 20_000,
            rho: 1.0,
            alpha: 1.6,
            adaptive_rho: true,
            infeasibility_check_every: 100,
            infeasibility_margin: 1e-6,
            verbose: false,
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    InfeasibleCertified,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// `M(y)` at the returned variables; equalities hold up to round-off.
    pub x: DMatrix<f64>,
    pub vars: Vec<f64>,
    pub status: SolveStatus,
    /// Relative gap between `M(y)` and its PSD and box copies.
    pub primal_residual: f64,
    /// Relative change of the PSD and box copies in the last iteration.
    pub dual_residual: f64,
    pub objective_value: f64,
    pub iterations: usize,
    pub equality_residual: f64,
    pub box_violation: f64,
    pub min_eigenvalue: f64,
    pub infeasibility_reason: Option<String>,
    pub elapsed_seconds: f64,
}

/// Eigenvalues and eigenvectors of a symmetric matrix.
///
/// Rows and columns that are exactly zero are split off first, since they only
/// add zero eigenvalues. If the QR iteration still returns a non-finite value
/// the matrix is shifted by a multiple of the identity and solved again.
pub fn symmetric_eigen(sym: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = sym.nrows();
    let keep: Vec<usize> = (0..n)
        .filter(|&i| sym.row(i).iter().any(|&v| v != 0.0))
        .collect();
    if keep.is_empty() {
        return (DVector::zeros(n), DMatrix::identity(n, n));
    }
    let sub = if keep.len() == n {
        sym.clone()
    } else {
        sym.select_rows(&keep).select_columns(&keep)
    };
    let scale = sub.amax().max(f64::MIN_POSITIVE);
    let mut shift = 0.0;
    let mut eig = SymmetricEigen::new(sub.clone());
    for attempt in 1..=4 {
        if eig
            .eigenvalues
            .iter()
            .chain(eig.eigenvectors.iter())
            .all(|v| v.is_finite())
        {
            break;
        }
        shift = scale * 1e-3 * attempt as f64;
        let shifted = &sub + DMatrix::identity(sub.nrows(), sub.nrows()) * shift;
        eig = SymmetricEigen::new(shifted);
    }
    let mut values = DVector::zeros(n);
    let mut vectors = DMatrix::zeros(n, n);
    for c in 0..keep.len() {
        values[c] = eig.eigenvalues[c] - shift;
        for (r, &j) in keep.iter().enumerate() {
            vectors[(j, c)] = eig.eigenvectors[(r, c)];
        }
    }
    // Remaining columns are unit vectors on the dropped coordinates.
    let dropped: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    for (offset, &j) in dropped.iter().enumerate() {
        vectors[(j, keep.len() + offset)] = 1.0;
    }
    (values, vectors)
}

/// Smallest eigenvalue of the symmetric part of `x`.
pub fn min_eigenvalue(x: &DMatrix<f64>) -> f64 {
    if x.nrows() == 0 {
        return 0.0;
    }
    let sym = (x + x.transpose()) * 0.5;
    symmetric_eigen(&sym)
        .0
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Euclidean projection onto the PSD cone (negative eigenvalues clamped to zero).
pub fn project_psd(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    if n == 0 {
        return x.clone();
    }
    let sym = (x + x.transpose()) * 0.5;
    let (values, vectors) = symmetric_eigen(&sym);
    let keep: Vec<usize> = (0..n).filter(|&i| values[i] > 0.0).collect();
    let mut b = DMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        let s = values[i].sqrt();
        b.set_column(c, &(vectors.column(i) * s));
    }
    &b * b.transpose()
}

/// Pivoted Cholesky returning the pivots of numerically independent rows.
fn independent_rows(g: &DMatrix<f64>, rel_tol: f64) -> Vec<usize> {
    let m = g.nrows();
    let mut d: Vec<f64> = (0..m).map(|i| g[(i, i)]).collect();
    let scale = d.iter().copied().fold(0.0, f64::max);
    if scale <= 0.0 {
        return Vec::new();
    }
    let mut l = DMatrix::<f64>::zeros(m, m);
    let mut used = vec![false; m];
    let mut pivots = Vec::new();
    for col in 0..m {
        let Some(p) = (0..m)
            .filter(|&i| !used[i])
            .max_by(|&a, &b| d[a].total_cmp(&d[b]))
        else {
            break;
        };
        if d[p] <= rel_tol * scale {
            break;
        }
        used[p] = true;
        pivots.push(p);
        let lpp = d[p].sqrt();
        l[(p, col)] = lpp;
        for i in 0..m {
            if used[i] {
                continue;
            }
            let mut s = g[(i, p)];
            for c in 0..col {
                s -= l[(i, c)] * l[(p, c)];
            }
            let v = s / lpp;
            l[(i, col)] = v;
            d[i] -= v * v;
        }
    }
    pivots.sort_unstable();
    pivots
}

/// Problem after removing forced zeros and redundant equalities.
struct Reduced {
    dim: usize,
    /// Reduced matrix entries `(i, j, var)` with `i ≤ j`.
    entries: Vec<(usize, usize, usize)>,
    /// Reduced variable → original variable.
    orig: Vec<usize>,
    weight: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    bounded: Vec<bool>,
    a: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    lin: Vec<f64>,
    lrows: Vec<Vec<(usize, f64)>>,
}

enum Presolve {
    Ready(Reduced),
    Infeasible { reason: String, residual: f64 },
}

fn presolve(p: &SdpProblem) -> Presolve {
    let n = p.dim;
    let mut zero = p.fixed_zero.clone();
    let mut dropped = vec![false; n];
    loop {
        let mut changed = false;
        for i in 0..n {
            if dropped[i] {
                continue;
            }
            let diag_zero = p.var_of(i, i).is_none_or(|v| zero[v]);
            if diag_zero {
                dropped[i] = true;
                changed = true;
                for j in 0..n {
                    if let Some(v) = p.var_of(i, j) {
                        zero[v] = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for v in 0..p.num_vars {
        if zero[v] && (p.lower[v] > 0.0 || p.upper[v] < 0.0) {
            return Presolve::Infeasible {
                reason: format!("variable {v} is forced to zero but bounded away from it"),
                residual: p.lower[v].max(-p.upper[v]),
            };
        }
    }

    let mut red_of = vec![usize::MAX; p.num_vars];
    let mut orig = Vec::new();
    for v in 0..p.num_vars {
        if !zero[v] {
            red_of[v] = orig.len();
            orig.push(v);
        }
    }
    let nv = orig.len();
    let rows: Vec<usize> = (0..n).filter(|&i| !dropped[i]).collect();
    let mut weight = vec![0.0; nv];
    let mut entries = Vec::new();
    for (rj, &j) in rows.iter().enumerate() {
        for (ri, &i) in rows.iter().enumerate().take(rj + 1) {
            if let Some(v) = p.var_of(i, j) {
                if !zero[v] {
                    let r = red_of[v];
                    weight[r] += if ri == rj { 1.0 } else { 2.0 };
                    entries.push((ri, rj, r));
                }
            }
        }
    }
    let lower: Vec<f64> = orig.iter().map(|&v| p.lower[v]).collect();
    let upper: Vec<f64> = orig.iter().map(|&v| p.upper[v]).collect();
    let bounded: Vec<bool> = lower
        .iter()
        .zip(&upper)
        .map(|(l, u)| l.is_finite() || u.is_finite())
        .collect();

    let mut a = Vec::new();
    let mut b = Vec::new();
    for c in &p.constraints {
        let mut row: Vec<(usize, f64)> = Vec::new();
        for &(v, coef) in &c.coeffs {
            if !zero[v] && coef != 0.0 {
                row.push((red_of[v], coef));
            }
        }
        row.sort_unstable_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
        for (v, coef) in row {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += coef,
                _ => merged.push((v, coef)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        let norm = merged.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt();
        if norm == 0.0 {
            if c.rhs.abs() > 1e-12 {
                return Presolve::Infeasible {
                    reason: format!("constraint reduces to 0 = {}", c.rhs),
                    residual: c.rhs.abs(),
                };
            }
            continue;
        }
        a.push(
            merged
                .into_iter()
                .map(|(v, coef)| (v, coef / norm))
                .collect::<Vec<_>>(),
        );
        b.push(c.rhs / norm);
    }

    let mut lin = vec![0.0; nv];
    let mut lrows = Vec::new();
    match &p.objective {
        Objective::Feasibility => {}
        Objective::Linear(c) => {
            for &(v, coef) in c {
                if !zero[v] {
                    lin[red_of[v]] += coef;
                }
            }
        }
        Objective::SquaredNorm(rows) => {
            for r in rows {
                let row: Vec<(usize, f64)> = r
                    .iter()
                    .filter(|e| !zero[e.0])
                    .map(|&(v, c)| (red_of[v], c))
                    .collect();
                if !row.is_empty() {
                    lrows.push(row);
                }
            }
        }
    }

    let mut red = Reduced {
        dim: rows.len(),
        entries,
        orig,
        weight,
        lower,
        upper,
        bounded,
        a,
        b,
        lin,
        lrows,
    };

    // Keep an independent subset of the equalities and check the rest against it.
    let d = red.diag();
    let g0 = red.gram(&d, &red.a);
    let keep = independent_rows(&g0, 1e-11);
    if keep.len() < red.a.len() {
        let sub_a: Vec<_> = keep.iter().map(|&i| red.a[i].clone()).collect();
        let sub_b: Vec<f64> = keep.iter().map(|&i| red.b[i]).collect();
        let y0 = red.min_norm_solution(&d, &sub_a, &sub_b);
        let worst = red
            .a
            .iter()
            .zip(&red.b)
            .map(|(row, &rhs)| (row.iter().map(|&(v, c)| c * y0[v]).sum::<f64>() - rhs).abs())
            .fold(0.0, f64::max);
        if worst > 1e-8 {
            return Presolve::Infeasible {
                reason: "equality constraints are inconsistent".into(),
                residual: worst,
            };
        }
        red.a = sub_a;
        red.b = sub_b;
    }
    Presolve::Ready(red)
}

impl Reduced {
    fn nv(&self) -> usize {
        self.orig.len()
    }

    /// Diagonal of the quadratic term: Frobenius weights, box copies, and a
    /// unit proximal weight for variables that appear nowhere else.
    fn diag(&self) -> Vec<f64> {
        (0..self.nv())
            .map(|v| {
                let d = self.weight[v] + if self.bounded[v] { 1.0 } else { 0.0 };
                if d == 0.0 {
                    1.0
                } else {
                    d
                }
            })
            .collect()
    }

    fn gram(&self, d: &[f64], a: &[Vec<(usize, f64)>]) -> DMatrix<f64> {
        let m = a.len();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.nv()];
        for (i, row) in a.iter().enumerate() {
            for &(v, c) in row {
                cols[v].push((i, c));
            }
        }
        let mut g = DMatrix::zeros(m, m);
        for (v, col) in cols.iter().enumerate() {
            for &(i, ci) in col {
                for &(j, cj) in col {
                    g[(i, j)] += ci * cj / d[v];
                }
            }
        }
        g
    }

    fn min_norm_solution(&self, d: &[f64], a: &[Vec<(usize, f64)>], b: &[f64]) -> Vec<f64> {
        let g = self.gram(d, a);
        let chol = Cholesky::new(g).expect("independent rows give a positive definite Gram matrix");
        let mu = chol.solve(&DVector::from_column_slice(b));
        let mut y = vec![0.0; self.nv()];
        for (row, &m) in a.iter().zip(mu.iter()) {
            for &(v, c) in row {
                y[v] += c * m / d[v];
            }
        }
        y
    }

    fn matrix(&self, y: &[f64]) -> DMatrix<f64> {
        let mut x = DMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            x[(i, j)] = y[v];
            x[(j, i)] = y[v];
        }
        x
    }

    /// Adjoint of [`Reduced::matrix`].
    fn adjoint(&self, t: &DMatrix<f64>) -> Vec<f64> {
        let mut out = vec![0.0; self.nv()];
        for &(i, j, v) in &self.entries {
            out[v] += if i == j {
                t[(i, i)]
            } else {
                t[(i, j)] + t[(j, i)]
            };
        }
        out
    }

    fn apply_a(&self, y: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.a.len(),
            self.a
                .iter()
                .map(|row| row.iter().map(|&(v, c)| c * y[v]).sum()),
        )
    }

    fn apply_at(&self, mu: &DVector<f64>) -> Vec<f64> {
        let mut out = vec![0.0; self.nv()];
        for (row, &m) in self.a.iter().zip(mu.iter()) {
            for &(v, c) in row {
                out[v] += c * m;
            }
        }
        out
    }
}

/// Cached solver for `min ½yᵀDy − hᵀy + f(y)/ρ` subject to `Ay = b`.
struct AffineSolver {
    d: Vec<f64>,
    /// `(ρ/2)I + L D⁻¹ Lᵀ` for squared-norm objectives.
    s_chol: Option<Cholesky<f64, Dyn>>,
    g_chol: Option<Cholesky<f64, Dyn>>,
    rho: f64,
}

impl AffineSolver {
    fn new(red: &Reduced, d: Vec<f64>, g0: &DMatrix<f64>, rho: f64) -> Self {
        let m = red.a.len();
        let (s_chol, g) = if red.lrows.is_empty() {
            (None, g0.clone())
        } else {
            let r = red.lrows.len();
            let mut s = DMatrix::identity(r, r) * (rho / 2.0);
            let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); red.nv()];
            for (i, row) in red.lrows.iter().enumerate() {
                for &(v, c) in row {
                    cols[v].push((i, c));
                }
            }
            for (v, col) in cols.iter().enumerate() {
                for &(i, ci) in col {
                    for &(j, cj) in col {
                        s[(i, j)] += ci * cj / d[v];
                    }
                }
            }
            let mut pm = DMatrix::zeros(m, r);
            for (i, row) in red.a.iter().enumerate() {
                for &(v, c) in row {
                    for &(j, lj) in &cols[v] {
                        pm[(i, j)] += c * lj / d[v];
                    }
                }
            }
            let s_chol = Cholesky::new(s).expect("shifted Gram matrix is positive definite");
            let correction = &pm * s_chol.solve(&pm.transpose());
            (Some(s_chol), g0 - correction)
        };
        let g_chol = if m > 0 {
            Some(Cholesky::new(g).expect("independent constraint rows"))
        } else {
            None
        };
        Self {
            d,
            s_chol,
            g_chol,
            rho,
        }
    }

    /// `Q⁻¹ v` with `Q = D + (2/ρ)LᵀL`.
    fn q_inv(&self, red: &Reduced, v: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = v.iter().zip(&self.d).map(|(a, d)| a / d).collect();
        if let Some(s_chol) = &self.s_chol {
            let lv = DVector::from_iterator(
                red.lrows.len(),
                red.lrows
                    .iter()
                    .map(|row| row.iter().map(|&(k, c)| c * out[k]).sum()),
            );
            let w = s_chol.solve(&lv);
            for (row, &wi) in red.lrows.iter().zip(w.iter()) {
                for &(k, c) in row {
                    out[k] -= c * wi / self.d[k];
                }
            }
        }
        out
    }

    fn solve(&self, red: &Reduced, h: &[f64]) -> Vec<f64> {
        let rhs: Vec<f64> = h
            .iter()
            .zip(&red.lin)
            .map(|(h, c)| h - c / self.rho)
            .collect();
        let y0 = self.q_inv(red, &rhs);
        let Some(g_chol) = &self.g_chol else {
            return y0;
        };
        let resid = red.apply_a(&y0) - DVector::from_column_slice(&red.b);
        let mu = g_chol.solve(&resid);
        let corr = self.q_inv(red, &red.apply_at(&mu));
        y0.iter().zip(&corr).map(|(a, c)| a - c).collect()
    }
}

/// Checks whether a PSD direction `Y` with `⟨Y, M(y)⟩ < 0` on the whole
/// affine-and-box set exists along `direction`. Returns the certified margin.
fn improving_ray(
    red: &Reduced,
    d: &[f64],
    g0_chol: Option<&Cholesky<f64, Dyn>>,
    direction: &DMatrix<f64>,
) -> Option<f64> {
    let y_dir = project_psd(direction);
    let norm = y_dir.norm();
    if norm < 1e-12 {
        return None;
    }
    let y_dir = y_dir / norm;
    let c = red.adjoint(&y_dir);
    let lambda = match g0_chol {
        Some(ch) => {
            let cd: Vec<f64> = c.iter().zip(d).map(|(c, d)| c / d).collect();
            ch.solve(&red.apply_a(&cd))
        }
        None => DVector::zeros(0),
    };
    let at = red.apply_at(&lambda);
    let mut bound: f64 = lambda.iter().zip(&red.b).map(|(l, b)| l * b).sum();
    for v in 0..red.nv() {
        let s = c[v] - at[v];
        if s.abs() <= 1e-10 {
            continue;
        }
        let sup = if s > 0.0 {
            s * red.upper[v]
        } else {
            s * red.lower[v]
        };
        if !sup.is_finite() {
            return None;
        }
        bound += sup;
    }
    Some(-bound)
}

#[derive(Serialize)]
struct IterLog {
    iter: usize,
    rho: f64,
    primal: f64,
    dual: f64,
    objective: f64,
}

fn frob_sq(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum()
}

fn vec_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

pub fn solve(problem: &SdpProblem, options: &SolveOptions) -> SdpSolution {
    let start = Instant::now();
    let red = match presolve(problem) {
        Presolve::Ready(r) => r,
        Presolve::Infeasible { reason, residual } => {
            return SdpSolution {
                x: DMatrix::zeros(problem.dim, problem.dim),
                vars: vec![0.0; problem.num_vars],
                status: SolveStatus::InfeasibleCertified,
                primal_residual: residual,
                dual_residual: 0.0,
                objective_value: f64::NAN,
                iterations: 0,
                equality_residual: residual,
                box_violation: 0.0,
                min_eigenvalue: f64::NAN,
                infeasibility_reason: Some(reason),
                elapsed_seconds: start.elapsed().as_secs_f64(),
            };
        }
    };

    let nv = red.nv();
    let d = red.diag();
    let g0 = red.gram(&d, &red.a);
    let g0_chol = if red.a.is_empty() {
        None
    } else {
        Cholesky::new(g0.clone())
    };
    let mut rho = options.rho;
    let mut solver = AffineSolver::new(&red, d.clone(), &g0, rho);

    let bounded_idx: Vec<usize> = (0..nv).filter(|&v| red.bounded[v]).collect();
    let prox_idx: Vec<usize> = (0..nv)
        .filter(|&v| red.weight[v] == 0.0 && !red.bounded[v])
        .collect();
    let clamp = |v: usize, x: f64| x.max(red.lower[v]).min(red.upper[v]);

    let (mut z, mut y) = match &options.warm_start {
        Some(x0) if x0.nrows() == problem.dim => {
            let full_vars = problem.vars_from_matrix(x0);
            let y: Vec<f64> = red.orig.iter().map(|&v| full_vars[v]).collect();
            (project_psd(&red.matrix(&y)), y)
        }
        _ => (DMatrix::zeros(red.dim, red.dim), vec![0.0; nv]),
    };
    let mut u = DMatrix::zeros(red.dim, red.dim);
    let mut zb: Vec<f64> = bounded_idx.iter().map(|&v| clamp(v, y[v])).collect();
    let mut ub = vec![0.0; bounded_idx.len()];
    let mut u_saved = u.clone();

    let mut status = SolveStatus::MaxIterations;
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0;
    let mut rho_updates = 0;
    let mut reason = None;

    for iter in 1..=options.max_iter {
        iterations = iter;
        // y-update
        let mut h = red.adjoint(&(&z - &u));
        for (k, &v) in bounded_idx.iter().enumerate() {
            h[v] += zb[k] - ub[k];
        }
        for &v in &prox_idx {
            h[v] += y[v];
        }
        y = solver.solve(&red, &h);

        // PSD copy
        let x = red.matrix(&y);
        let x_hat = &x * options.alpha + &z * (1.0 - options.alpha);
        let z_old = std::mem::replace(&mut z, project_psd(&(&x_hat + &u)));
        u += &x_hat - &z;

        // box copy
        let mut box_primal = 0.0;
        let mut box_change = 0.0;
        for (k, &v) in bounded_idx.iter().enumerate() {
            let yh = options.alpha * y[v] + (1.0 - options.alpha) * zb[k];
            let old = zb[k];
            zb[k] = clamp(v, yh + ub[k]);
            ub[k] += yh - zb[k];
            box_primal += (y[v] - zb[k]).powi(2);
            box_change += (zb[k] - old).powi(2);
        }

        let r_p = (frob_sq(&(&x - &z)) + box_primal).sqrt();
        let r_d = rho * (frob_sq(&(&z - &z_old)) + box_change).sqrt();
        let scale_p = x.norm().max(z.norm()).max(1.0);
        let scale_d = (rho * (frob_sq(&u) + vec_sq(&ub)).sqrt()).max(1.0);
        primal = r_p / scale_p;
        dual = r_d / scale_d;

        if options.verbose && (iter % 50 == 0 || iter == 1) {
            let log = IterLog {
                iter,
                rho,
                primal,
                dual,
                objective: red.lin.iter().zip(&y).map(|(c, y)| c * y).sum(),
            };
            eprintln!("{}", serde_json::to_string(&log).unwrap_or_default());
        }

        if primal <= options.tol_primal && dual <= options.tol_dual {
            status = SolveStatus::Converged;
            break;
        }

        let every = options.infeasibility_check_every;
        if every > 0 && iter % every == 0 {
            if iter >= 2 * every {
                let delta = &u - &u_saved;
                for dir in [delta.clone(), -delta] {
                    if let Some(margin) = improving_ray(&red, &d, g0_chol.as_ref(), &dir) {
                        if margin > options.infeasibility_margin {
                            status = SolveStatus::InfeasibleCertified;
                            reason = Some(format!("improving ray with margin {margin:.3e}"));
                        }
                    }
                }
                if status == SolveStatus::InfeasibleCertified {
                    break;
                }
            }
            u_saved = u.clone();
        }

        if options.adaptive_rho && iter % 50 == 0 && rho_updates < 40 {
            let factor = if primal > 10.0 * dual {
                2.0
            } else if dual > 10.0 * primal {
                0.5
            } else {
                1.0
            };
            if factor != 1.0 {
                rho *= factor;
                u /= factor;
                u_saved /= factor;
                for x in &mut ub {
                    *x /= factor;
                }
                solver = AffineSolver::new(&red, d.clone(), &g0, rho);
                rho_updates += 1;
            }
        }
    }

    let mut vars = vec![0.0; problem.num_vars];
    for (r, &v) in red.orig.iter().enumerate() {
        vars[v] = y[r];
    }
    let x = problem.matrix_from_vars(&vars);
    let min_eig = min_eigenvalue(&x);
    SdpSolution {
        objective_value: problem.objective_value(&vars),
        equality_residual: problem.equality_residual(&vars),
        box_violation: problem.box_violation(&vars),
        min_eigenvalue: min_eig,
        x,
        vars,
        status,
        primal_residual: primal,
        dual_residual: dual,
        iterations,
        infeasibility_reason: reason,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    }
}
