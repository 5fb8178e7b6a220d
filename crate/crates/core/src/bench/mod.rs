//! Benchmark runs: solve instances with each method, compare against the
//! exact optimum (or the truth cost when the exact search is out of reach),
//! and tabulate times and gaps.

mod plot;
mod table;

pub use plot::{plot, plot_svg, PlotAxis};
pub use table::{format_csv, parse_csv, read_csv, write_csv, CSV_HEADER};

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulation::{build_qubm, DEFAULT_ALPHA, DEFAULT_GAMMA};
use crate::instance::Instance;
use crate::io::read_instance;
use crate::solve::{
    anneal_instance, exact_search_with, greedy_baseline, AnnealSchedule, ExactOptions, SolveReport,
};

/// Percentage by which `computed` exceeds `reference`, relative to
/// `|reference|`. Positive means worse than the reference.
pub fn gap(computed: f64, reference: f64) -> Result<f64> {
    if reference == 0.0 {
        return Err(Error::UndefinedGap);
    }
    Ok((computed - reference) / reference.abs() * 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sa,
    Exact,
    Greedy,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sa => "sa",
            Method::Exact => "exact",
            Method::Greedy => "greedy",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sa" => Ok(Method::Sa),
            "exact" => Ok(Method::Exact),
            "greedy" => Ok(Method::Greedy),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// Where `S*` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Exact,
    Truth,
}

impl Reference {
    pub fn name(self) -> &'static str {
        match self {
            Reference::Exact => "exact",
            Reference::Truth => "truth",
        }
    }
}

/// Outcome of one cell; written to the `feasible` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Feasible,
    Infeasible,
    Timeout,
    /// The solver refused the instance (e.g. above the exact-search cap).
    Error,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Feasible => "true",
            Status::Infeasible => "false",
            Status::Timeout => "timeout",
            Status::Error => "error",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "true" => Some(Status::Feasible),
            "false" => Some(Status::Infeasible),
            "timeout" => Some(Status::Timeout),
            "error" => Some(Status::Error),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub no_hits: usize,
    pub method: Method,
    pub s_star: Option<f64>,
    pub reference: Option<Reference>,
    pub s: Option<f64>,
    /// Preprocessing seconds: parse plus model builds.
    pub tp: f64,
    /// Solve seconds.
    pub tr: f64,
    pub tt: f64,
    pub gap: Option<f64>,
    pub status: Status,
    pub seed: u64,
}

/// Per-method averages over all instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub atp: f64,
    pub atr: f64,
    pub att: f64,
    /// Mean gap over rows that have one.
    pub agap: Option<f64>,
    pub feasible: usize,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
    pub summary: Vec<MethodSummary>,
}

impl BenchTable {
    pub fn from_rows(rows: Vec<BenchRow>) -> Self {
        let summary = summarize(&rows);
        Self { rows, summary }
    }

    pub fn summary_for(&self, method: Method) -> Option<&MethodSummary> {
        self.summary.iter().find(|s| s.method == method)
    }
}

fn summarize(rows: &[BenchRow]) -> Vec<MethodSummary> {
    let mut methods: Vec<Method> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    methods
        .into_iter()
        .map(|m| {
            let mine: Vec<&BenchRow> = rows.iter().filter(|r| r.method == m).collect();
            let n = mine.len() as f64;
            let mean = |f: fn(&BenchRow) -> f64| mine.iter().map(|r| f(r)).sum::<f64>() / n;
            let gaps: Vec<f64> = mine.iter().filter_map(|r| r.gap).collect();
            MethodSummary {
                method: m,
                atp: mean(|r| r.tp),
                atr: mean(|r| r.tr),
                att: mean(|r| r.tt),
                agap: (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64),
                feasible: mine.iter().filter(|r| r.status == Status::Feasible).count(),
                runs: mine.len(),
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BenchParams {
    pub alpha: f64,
    pub gamma: f64,
    /// Cell `c` (instance-major, method-minor) uses seed `seed + c`.
    pub seed: u64,
    pub time_limit: Duration,
    pub schedule: AnnealSchedule,
    pub exact_cap: usize,
}

impl Default for BenchParams {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            gamma: DEFAULT_GAMMA,
            seed: 0,
            time_limit: Duration::from_secs(360),
            schedule: AnnealSchedule::default(),
            exact_cap: crate::solve::DEFAULT_EXACT_CAP,
        }
    }
}

/// Millisecond resolution.
fn millis(d: Duration) -> f64 {
    (d.as_secs_f64() * 1000.0).round() / 1000.0
}

/// Instance files in `paths`, expanding directories to their `.tf` files in
/// name order.
pub fn collect_instance_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "tf"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Read and solve every instance file with every method.
pub fn run_bench(paths: &[PathBuf], methods: &[Method], params: &BenchParams) -> Result<BenchTable> {
    if methods.is_empty() {
        return Err(Error::NoMethods);
    }
    let mut loaded = Vec::with_capacity(paths.len());
    for path in paths {
        let t = Instant::now();
        let inst = read_instance(path)?;
        loaded.push((instance_name(path), inst, t.elapsed()));
    }
    run_bench_loaded(&loaded, methods, params)
}

/// As [`run_bench`] for instances already in memory; the duration is the
/// parse time charged to preprocessing.
pub fn run_bench_loaded(
    instances: &[(String, Instance, Duration)],
    methods: &[Method],
    params: &BenchParams,
) -> Result<BenchTable> {
    if methods.is_empty() {
        return Err(Error::NoMethods);
    }
    let mut rows = Vec::with_capacity(instances.len() * methods.len());
    for (idx, (name, inst, parse_time)) in instances.iter().enumerate() {
        let exact_opts = ExactOptions {
            max_hits_per_layer: params.exact_cap,
            prune: true,
            deadline: Some(Instant::now() + params.time_limit),
        };
        let t = Instant::now();
        let exact = Outcome::from(exact_search_with(inst, params.alpha, &exact_opts));
        let exact_time = t.elapsed();

        let (s_star, reference) = match &exact {
            Outcome::Solved(r) => (Some(r.objective), Some(Reference::Exact)),
            _ => match inst.true_cost() {
                Ok(c) => (Some(params.alpha * c), Some(Reference::Truth)),
                Err(_) => (None, None),
            },
        };

        for (m_idx, &method) in methods.iter().enumerate() {
            let seed = params.seed.wrapping_add((idx * methods.len() + m_idx) as u64);
            let mut tp = *parse_time;
            let (outcome, tr) = match method {
                Method::Exact => (exact.clone(), exact_time),
                Method::Greedy => {
                    let t = Instant::now();
                    let r = greedy_baseline(inst, params.alpha);
                    (Outcome::from(r), t.elapsed())
                }
                Method::Sa => {
                    let t = Instant::now();
                    let model = build_qubm(inst, params.alpha, params.gamma);
                    tp += t.elapsed();
                    let t = Instant::now();
                    let deadline = Some(t + params.time_limit);
                    let schedule = AnnealSchedule { seed, ..params.schedule };
                    let r = model.and_then(|m| anneal_instance(inst, &m, &schedule, deadline));
                    (Outcome::from(r), t.elapsed())
                }
            };
            let (tp, tr) = (millis(tp), millis(tr));
            let (s, status) = match &outcome {
                Outcome::Solved(r) if r.feasible => (Some(r.objective), Status::Feasible),
                Outcome::Solved(r) => (Some(r.objective), Status::Infeasible),
                Outcome::Timeout => (None, Status::Timeout),
                Outcome::Failed => (None, Status::Error),
            };
            let gap = match (s, s_star, status) {
                (Some(s), Some(r), Status::Feasible) => gap(s, r).ok(),
                _ => None,
            };
            rows.push(BenchRow {
                instance: name.clone(),
                no_hits: inst.num_hits(),
                method,
                s_star,
                reference,
                s,
                tp,
                tr,
                tt: tp + tr,
                gap,
                status,
                seed,
            });
        }
    }
    Ok(BenchTable::from_rows(rows))
}

#[derive(Clone)]
enum Outcome {
    Solved(SolveReport),
    Timeout,
    Failed,
}

impl From<Result<SolveReport>> for Outcome {
    fn from(r: Result<SolveReport>) -> Self {
        match r {
            Ok(r) => Outcome::Solved(r),
            Err(Error::Timeout) => Outcome::Timeout,
            Err(_) => Outcome::Failed,
        }
    }
}
