//! The `srclique` command line: argument parsing, experiment configs and JSON reports.
//!
//! Every report is the command's result object plus a `run` block holding the
//! tool version, the replayable config, its SHA-256 hash and timings.

use std::error::Error;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::certify::{self, BottomBlock, FeasibilityOptions, SdpFeasibility};
use crate::graphs::{self, AdditionStrategy, AdversaryPlan, DeletionStrategy, Graph};
use crate::listdecode::{self, DecodeParams};
use crate::lowdeg;
use crate::oracle;
use crate::sdp::{self, SolveOptions};
use crate::sos::{self, PseudoDistribution, SosError, SosOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INAPPLICABLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
/// Environment variable fixing the worker thread count.
pub const THREADS_ENV: &str = "SRCLIQUE_THREADS";

type CliResult<T> = Result<T, Box<dyn Error + Send + Sync>>;

#[derive(Debug, Parser)]
#[command(
    name = "srclique",
    version,
    about = "Semi-random planted clique experiments"
)]
pub struct Cli {
    /// Replay the `run.config` block of an earlier report instead of a subcommand.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub output: Option<PathBuf>,
    #[serde(flatten)]
    pub command: Command,
}

impl ExperimentConfig {
    /// SHA-256 of the command and its arguments; the output path is left out.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.command).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Sample a semi-random instance or a bipartite test graph.
    Gen(GenArgs),
    /// Certify that a bipartite graph has no large unbalanced biclique.
    Certify(CertifyArgs),
    /// Check the explicit degree-2 SDP solution and probe the feasibility frontier.
    SdpLb(SdpLbArgs),
    /// Solve the min-norm clique pseudo-distribution.
    Solve(SolveArgs),
    /// Round a pseudo-distribution to a list of cliques.
    Listdecode(ListDecodeArgs),
    /// Exhaustive reference answers for small inputs.
    Oracle(OracleArgs),
    /// Exact low-degree likelihood-ratio norms.
    Lowdeg(LowdegArgs),
    /// Time the main pipeline stages.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-6)]
    pub tol_primal: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_dual: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iter: usize,
}

impl SolverArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            tol_primal: self.tol_primal,
            tol_dual: self.tol_dual,
            max_iter: self.max_iter,
            ..SolveOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    Fk,
    Bipartite,
    PlantedBiclique,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeletionArg {
    None,
    DeleteAllCut,
    DeleteRandomCut,
    DegreeFlatten,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdditionArg {
    None,
    Copies,
    Clique,
    Rewrite,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value_t = GenKind::Fk)]
    pub kind: GenKind,
    /// Vertex count (fk) or right side size (bipartite kinds).
    #[arg(long)]
    pub n: usize,
    /// Planted clique size (fk) or left side size (bipartite kinds).
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Left side of the planted biclique.
    #[arg(long, default_value_t = 0)]
    pub l: usize,
    #[arg(long, value_enum, default_value_t = DeletionArg::None)]
    pub plan: DeletionArg,
    /// Deletion probability for `delete-random-cut`.
    #[arg(long, default_value_t = 0.5)]
    pub cut_fraction: f64,
    #[arg(long, value_enum, default_value_t = AdditionArg::None)]
    pub add: AdditionArg,
    /// Copies, clique size or rewrite density for `--add`.
    #[arg(long, default_value_t = 0.0)]
    pub add_param: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl GenArgs {
    pub fn plan(&self) -> AdversaryPlan {
        let deletion = match self.plan {
            DeletionArg::None => DeletionStrategy::None,
            DeletionArg::DeleteAllCut => DeletionStrategy::DeleteAllCut,
            DeletionArg::DeleteRandomCut => {
                DeletionStrategy::DeleteRandomCutFraction(self.cut_fraction)
            }
            DeletionArg::DegreeFlatten => DeletionStrategy::DegreeFlatten,
        };
        let addition = match self.add {
            AdditionArg::None => AdditionStrategy::None,
            AdditionArg::Copies => AdditionStrategy::DisjointPlantedCopies(self.add_param as usize),
            AdditionArg::Clique => {
                AdditionStrategy::FullCliqueOnComplementSubset(self.add_param as usize)
            }
            AdditionArg::Rewrite => AdditionStrategy::ErdosRenyiRewrite(self.add_param),
        };
        AdversaryPlan::new(deletion, addition)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertifyMethod {
    Spectral,
    Geometric,
    Sdp,
    Balancedness,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CertifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = CertifyMethod::Spectral)]
    pub method: CertifyMethod,
    /// Biclique size; defaults to the left side size.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BottomArg {
    Literal,
    Shifted,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SdpLbArgs {
    /// Bipartite graph file; when absent a random graph is sampled from `--k --m --p --seed`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub l: usize,
    #[arg(long, value_enum, default_value_t = BottomArg::Literal)]
    pub bottom: BottomArg,
    /// Also run the solver, warm-started from the non-negative variant.
    #[arg(long)]
    pub solve: bool,
    /// Run the feasibility test for every `ℓ` in `1..=scan`.
    #[arg(long, default_value_t = 0)]
    pub scan: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Clique size; defaults to `params.k` of an instance file.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ListDecodeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    /// Repetitions; defaults to `⌈4(n/k)^t⌉`.
    #[arg(long)]
    pub repetitions: Option<usize>,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// Density for the repair thresholds; defaults to `params.p` of an instance file, else ½.
    #[arg(long)]
    pub p: Option<f64>,
    /// Reuse a pseudo-distribution written by `solve`.
    #[arg(long)]
    pub distribution: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    Bicliques,
    Cliques,
    Good,
    Quasi,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OracleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = OracleMode::Cliques)]
    pub mode: OracleMode,
    #[arg(long)]
    pub k: Option<usize>,
    /// Goodness parameter for `good`.
    #[arg(long, default_value_t = 0)]
    pub l: usize,
    /// Seed constant for `quasi`; defaults to the smallest giving seeds of size 2.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = oracle::DEFAULT_CLIQUE_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LowdegArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub l: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    /// Also write the per-shape terms as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BenchArgs {
    /// Matrix sides for the eigendecomposition timing.
    #[arg(long, value_delimiter = ',', default_value = "100,200,300")]
    pub eig_sizes: Vec<usize>,
    /// Vertex count for the end-to-end stage timings.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

enum Outcome {
    Done(Value),
    Inapplicable(Value),
}

struct Timer {
    start: Instant,
    stages: Vec<(String, f64)>,
}

impl Timer {
    fn new() -> Self {
        Self {
            start: Instant::now(),
            stages: Vec::new(),
        }
    }

    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.stages
            .push((name.to_string(), t.elapsed().as_secs_f64()));
        out
    }

    fn to_json(&self) -> Value {
        let stages: serde_json::Map<String, Value> = self
            .stages
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        json!({ "total_seconds": self.start.elapsed().as_secs_f64(), "stages": stages })
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()).into())
}

fn read_json(path: &Path) -> CliResult<Value> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn instance_field<T: serde::de::DeserializeOwned>(text: &str, pointer: &str) -> Option<T> {
    let v: Value = serde_json::from_str(text).ok()?;
    serde_json::from_value(v.pointer(pointer)?.clone()).ok()
}

fn run_gen(a: &GenArgs, timer: &mut Timer) -> CliResult<Outcome> {
    let value = match a.kind {
        GenKind::Fk => {
            let inst = timer.stage("sample", || {
                graphs::sample_fk(a.n, a.k, a.p, a.plan(), a.seed)
            })?;
            serde_json::to_value(graphs::InstanceFile::from(&inst))?
        }
        GenKind::Bipartite => {
            let h = timer.stage("sample", || {
                graphs::sample_er_bipartite(a.k, a.n, a.p, a.seed)
            })?;
            serde_json::to_value(&h)?
        }
        GenKind::PlantedBiclique => {
            let pb = timer.stage("sample", || {
                graphs::sample_planted_biclique(a.k, a.n, a.l, a.p, a.seed)
            })?;
            let mut v = serde_json::to_value(&pb.graph)?;
            v["solution"] = json!({ "left": pb.left_set, "right": pb.right_set });
            v
        }
    };
    Ok(Outcome::Done(value))
}

fn run_certify(a: &CertifyArgs, timer: &mut Timer) -> CliResult<Outcome> {
    let h = graphs::parse_bipartite(&read(&a.input)?)?;
    let k = a.k.unwrap_or(h.left_size());
    if a.method == CertifyMethod::Balancedness {
        let p = (a.p != 0.5).then_some(a.p);
        let rep = timer.stage("balancedness", || certify::balancedness(&h, a.r, p))?;
        return Ok(Outcome::Done(serde_json::to_value(rep)?));
    }
    let cert = timer.stage("certify", || match a.method {
        CertifyMethod::Spectral => certify::spectral_bound(&h, k, a.p),
        CertifyMethod::Geometric => certify::geometric_bound(&h, k, a.p, a.r),
        _ => certify::sdp_certificate(&h, k, &a.solver.options()),
    })?;
    let value = serde_json::to_value(&cert)?;
    Ok(if cert.applicable {
        Outcome::Done(value)
    } else {
        Outcome::Inapplicable(value)
    })
}

fn feasibility_json(f: &SdpFeasibility) -> Value {
    match f {
        SdpFeasibility::Feasible(x) => {
            json!({ "outcome": "Feasible", "min_eigenvalue": sdp::min_eigenvalue(x) })
        }
        SdpFeasibility::Infeasible(reason) => json!({ "outcome": "Infeasible", "reason": reason }),
        SdpFeasibility::Unknown(d) => json!({ "outcome": "Unknown", "diagnostics": d }),
    }
}

fn run_sdp_lb(a: &SdpLbArgs, timer: &mut Timer) -> CliResult<Outcome> {
    let h = match (&a.input, a.k, a.m) {
        (Some(path), _, _) => graphs::parse_bipartite(&read(path)?)?,
        (None, Some(k), Some(m)) => graphs::sample_er_bipartite(k, m, a.p, a.seed)?,
        _ => return Err("give --input or both --k and --m".into()),
    };
    let k = a.k.unwrap_or(h.left_size());
    let bottom = match a.bottom {
        BottomArg::Literal => BottomBlock::Literal,
        BottomArg::Shifted => BottomBlock::Shifted,
    };
    let (_, report) = timer.stage("construction", || {
        certify::sdp_lb_construction_with(&h, k, a.l, bottom)
    })?;
    let satisfied = report.linear_residual() <= 1e-9
        && report.entry_violation <= 1e-9
        && report.min_eigenvalue >= -1e-6;
    let mut out = json!({ "construction": report, "bottom": a.bottom, "construction_satisfies_constraints": satisfied });
    let fopts = |warm: Option<DMatrix<f64>>| FeasibilityOptions {
        solve: a.solver.options(),
        warm_start: warm,
    };
    if a.solve {
        let (warm, _) = certify::sdp_lb_construction_with(&h, k, a.l, BottomBlock::Shifted)?;
        let f = timer.stage("solve", || {
            certify::sdp_biclique_feasibility(&h, k, a.l, &fopts(Some(warm)))
        })?;
        out["solver"] = feasibility_json(&f);
    }
    if a.scan > 0 {
        let scan: Vec<Value> = timer.stage("scan", || {
            (1..=a.scan.min(k))
                .map(|l| {
                    let f = certify::sdp_biclique_feasibility(&h, k, l, &fopts(None));
                    let integral = oracle::biclique_left_sizes(&h, k).ok().map(|s| s[l]);
                    let mut v = f
                        .map(|f| feasibility_json(&f))
                        .unwrap_or_else(|e| json!({ "error": e.to_string() }));
                    v["l"] = json!(l);
                    v["integral_biclique"] = json!(integral);
                    v
                })
                .collect()
        });
        out["frontier"] = json!(scan);
    }
    Ok(if satisfied {
        Outcome::Done(out)
    } else {
        Outcome::Inapplicable(out)
    })
}

fn load_graph_and_k(path: &Path, k: Option<usize>) -> CliResult<(Graph, usize, String)> {
    let text = read(path)?;
    let g = graphs::parse_graph(&text)?;
    let k = k
        .or_else(|| instance_field(&text, "/params/k"))
        .ok_or("clique size unknown: pass --k")?;
    Ok((g, k, text))
}

fn solve_distribution(
    g: &Graph,
    k: usize,
    degree: usize,
    solver: &SolverArgs,
) -> CliResult<Result<PseudoDistribution, Outcome>> {
    let opts = SosOptions {
        solve: solver.options(),
        ..SosOptions::default()
    };
    match sos::minimize_mean_norm_with(g, k, degree, &opts) {
        Ok(d) => Ok(Ok(d)),
        Err(SosError::Infeasible(reason)) => {
            Ok(Err(Outcome::Inapplicable(json!({ "infeasible": reason }))))
        }
        Err(SosError::NotConverged { partial }) => Ok(Err(Outcome::Inapplicable(
            json!({ "distribution": partial }),
        ))),
        Err(e) => Err(e.into()),
    }
}

fn run_solve(a: &SolveArgs, timer: &mut Timer) -> CliResult<Outcome> {
    let (g, k, _) = load_graph_and_k(&a.input, a.k)?;
    match timer.stage("solve", || solve_distribution(&g, k, a.degree, &a.solver))? {
        Ok(d) => Ok(Outcome::Done(json!({ "distribution": d }))),
        Err(outcome) => Ok(outcome),
    }
}

fn run_listdecode(a: &ListDecodeArgs, timer: &mut Timer) -> CliResult<Outcome> {
    let (g, k, text) = load_graph_and_k(&a.input, a.k)?;
    let p =
        a.p.or_else(|| instance_field(&text, "/params/p"))
            .unwrap_or(0.5);
    let dist = match &a.distribution {
        Some(path) => {
            let v = read_json(path)?;
            serde_json::from_value(v.get("distribution").cloned().unwrap_or(v))?
        }
        None => match timer.stage("solve", || solve_distribution(&g, k, a.degree, &a.solver))? {
            Ok(d) => d,
            Err(outcome) => return Ok(outcome),
        },
    };
    let mut params = DecodeParams::with_defaults(g.n(), k, a.t);
    params.delta = a.delta;
    if let Some(n) = a.repetitions {
        params.repetitions = n;
    }
    let raw = timer.stage("decode", || {
        listdecode::decode(&g, k, &params, &dist, a.seed)
    })?;
    let mut report = timer.stage("cleanup", || listdecode::cleanup(&g, k, p, &raw));
    // Ground truth is read only now, after decoding, for evaluation.
    if let Some(planted) = instance_field::<Vec<usize>>(&text, "/solution") {
        report.evaluate(&planted);
        let omega = graphs::cut_graph(&g, &planted)
            .ok()
            .and_then(|h| certify::spectral_bound(&h, k, p).ok())
            .filter(|c| c.applicable)
            .and_then(|c| c.certified_bound)
            .unwrap_or(k);
        report.rounding_condition = Some(listdecode::rounding_condition(
            omega as f64,
            g.n(),
            k,
            a.t,
            a.delta,
        ));
    }
    let empty = report.final_list.is_empty();
    let value = json!({ "report": report, "eta": dist.eta, "objective": dist.objective });
    Ok(if empty {
        Outcome::Inapplicable(value)
    } else {
        Outcome::Done(value)
    })
}

fn run_oracle(a: &OracleArgs, timer: &mut Timer) -> CliResult<Outcome> {
    let text = read(&a.input)?;
    let value = match a.mode {
        OracleMode::Bicliques => {
            let h = graphs::parse_bipartite(&text)?;
            let k = a.k.unwrap_or(h.left_size());
            let sizes = timer.stage("enumerate", || oracle::biclique_left_sizes(&h, k))?;
            let witness = oracle::max_biclique_witness(&h, k)?;
            let present: Vec<usize> = (0..sizes.len()).filter(|&l| sizes[l]).collect();
            json!({ "k": k, "left_sizes_present": present, "max_left": present.iter().filter(|&&l| l < k).max(), "witness": witness })
        }
        mode => {
            let g = graphs::parse_graph(&text)?;
            let k =
                a.k.or_else(|| instance_field(&text, "/params/k"))
                    .ok_or("clique size unknown: pass --k")?;
            let list = timer.stage("enumerate", || match mode {
                OracleMode::Cliques => oracle::enumerate_k_cliques(&g, k, a.cap),
                OracleMode::Good => oracle::exact_good_clique_list(&g, k, a.l),
                _ => oracle::quasi_brute_force(
                    &g,
                    k,
                    a.c.unwrap_or_else(|| oracle::default_seed_constant(g.n())),
                ),
            })?;
            json!({ "k": k, "count": list.len(), "cliques": list })
        }
    };
    Ok(Outcome::Done(value))
}

fn run_lowdeg(a: &LowdegArgs, timer: &mut Timer) -> CliResult<Outcome> {
    let rep = timer.stage("enumerate", || {
        lowdeg::lr_norm_squared(a.k, a.n, a.l, a.p, a.degree)
    })?;
    if let Some(path) = &a.csv {
        std::fs::write(path, rep.to_csv())?;
    }
    Ok(Outcome::Done(serde_json::to_value(rep)?))
}

fn run_bench(a: &BenchArgs, timer: &mut Timer) -> CliResult<Outcome> {
    let mut eig = Vec::new();
    for &size in &a.eig_sizes {
        let m = DMatrix::from_fn(size, size, |i, j| {
            (((i * 31 + j * 17) % 13) as f64 - 6.0) / 6.0
        });
        let sym = &m + m.transpose();
        let t = Instant::now();
        let _ = sdp::project_psd(&sym);
        eig.push(json!({ "dim": size, "seconds": t.elapsed().as_secs_f64() }));
    }
    let plan = AdversaryPlan::new(DeletionStrategy::DeleteAllCut, AdditionStrategy::None);
    let inst = timer.stage("gen", || graphs::sample_fk(a.n, a.k, 0.5, plan, a.seed))?;
    let dist = timer.stage("solve", || sos::minimize_mean_norm(&inst.graph, a.k, 4));
    let dist = match dist {
        Ok(d) => d,
        Err(SosError::NotConverged { partial }) => *partial,
        Err(e) => return Err(e.into()),
    };
    let params = DecodeParams::with_defaults(a.n, a.k, 1);
    let raw = timer.stage("decode", || {
        listdecode::decode(&inst.graph, a.k, &params, &dist, a.seed)
    })?;
    let fin = timer.stage("cleanup", || {
        listdecode::cleanup(&inst.graph, a.k, 0.5, &raw)
    });
    let h = graphs::cut_graph(&inst.graph, &inst.planted)?;
    timer.stage("spectral_certificate", || {
        certify::spectral_bound(&h, a.k, 0.5)
    })?;
    Ok(Outcome::Done(
        json!({ "eigendecomposition": eig, "final_list_length": fin.final_list.len() }),
    ))
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn execute(config: &ExperimentConfig) -> CliResult<i32> {
    let mut timer = Timer::new();
    let outcome = match &config.command {
        Command::Gen(a) => run_gen(a, &mut timer),
        Command::Certify(a) => run_certify(a, &mut timer),
        Command::SdpLb(a) => run_sdp_lb(a, &mut timer),
        Command::Solve(a) => run_solve(a, &mut timer),
        Command::Listdecode(a) => run_listdecode(a, &mut timer),
        Command::Oracle(a) => run_oracle(a, &mut timer),
        Command::Lowdeg(a) => run_lowdeg(a, &mut timer),
        Command::Bench(a) => run_bench(a, &mut timer),
    }?;
    let (mut value, code) = match outcome {
        Outcome::Done(v) => (v, EXIT_OK),
        Outcome::Inapplicable(v) => (v, EXIT_INAPPLICABLE),
    };
    if !value.is_object() {
        value = json!({ "result": value });
    }
    value["run"] = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "config_hash": config.hash(),
        "timings": timer.to_json(),
    });
    let text = serde_json::to_string_pretty(&value)? + "\n";
    match &config.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(code)
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let config = match (&cli.config, cli.command) {
        (Some(path), None) => {
            match read_json(path).and_then(|v| {
                let v = v.pointer("/run/config").cloned().unwrap_or(v);
                Ok(serde_json::from_value::<ExperimentConfig>(v)?)
            }) {
                Ok(mut c) => {
                    if cli.output.is_some() {
                        c.output = cli.output;
                    }
                    c
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_ERROR;
                }
            }
        }
        (None, Some(command)) => ExperimentConfig {
            output: cli.output,
            command,
        },
        _ => {
            eprintln!("error: give exactly one of a subcommand or --config\n");
            eprintln!("{}", <Cli as clap::CommandFactory>::command().render_help());
            return EXIT_USAGE;
        }
    };
    configure_threads();
    match execute(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> ExperimentConfig {
        let cli =
            Cli::try_parse_from(std::iter::once("srclique").chain(args.iter().copied())).unwrap();
        ExperimentConfig {
            output: cli.output,
            command: cli.command.unwrap(),
        }
    }

    #[test]
    fn config_round_trips() {
        let configs = [
            parse(&[
                "gen",
                "--n",
                "30",
                "--k",
                "14",
                "--p",
                "0.5",
                "--plan",
                "delete-all-cut",
                "--seed",
                "5",
                "-o",
                "inst.json",
            ]),
            parse(&[
                "certify",
                "--input",
                "bip.json",
                "--method",
                "geometric",
                "--r",
                "1",
                "--k",
                "12",
            ]),
            parse(&[
                "listdecode",
                "--input",
                "inst.json",
                "--t",
                "1",
                "--degree",
                "4",
                "--seed",
                "9",
            ]),
            parse(&[
                "lowdeg", "--k", "4", "--n", "6", "--l", "2", "--degree", "2",
            ]),
            parse(&["bench", "--eig-sizes", "10,20"]),
        ];
        for c in configs {
            let text = serde_json::to_string(&c).unwrap();
            let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.hash(), c.hash());
        }
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run(["srclique", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["srclique"]), EXIT_USAGE);
        assert_eq!(run(["srclique", "gen", "--k", "3"]), EXIT_USAGE);
    }

    #[test]
    fn plan_mapping() {
        let c = parse(&[
            "gen",
            "--n",
            "30",
            "--k",
            "14",
            "--plan",
            "delete-all-cut",
            "--add",
            "clique",
            "--add-param",
            "14",
        ]);
        let Command::Gen(a) = c.command else { panic!() };
        assert_eq!(
            a.plan(),
            AdversaryPlan::new(
                DeletionStrategy::DeleteAllCut,
                AdditionStrategy::FullCliqueOnComplementSubset(14)
            )
        );
    }
}
