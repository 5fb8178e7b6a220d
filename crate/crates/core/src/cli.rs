//! The `trackfind` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bench::{plot, run_bench, collect_instance_paths, format_csv, BenchParams, Method, PlotAxis};
use crate::error::{Error, Result};
use crate::formulation::{build_qubm, DEFAULT_ALPHA, DEFAULT_GAMMA};
use crate::generate::{generate_event, FilterConfig, GeneratorConfig, Preset};
use crate::io::{read_instance, write_instance};
use crate::solve::{
    anneal_instance, exact_search_with, greedy_baseline, AnnealSchedule, ExactOptions, SolveReport,
    DEFAULT_EXACT_CAP,
};

#[derive(Debug, Parser)]
#[command(name = "trackfind", version, about = "Track finding by combinatorial optimisation")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Master random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Weight of the triplet cost.
    #[arg(long, global = true, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Weight of the degree penalties.
    #[arg(long, global = true, default_value_t = DEFAULT_GAMMA)]
    gamma: f64,
    /// Per-solve time limit, seconds.
    #[arg(long, global = true, default_value_t = 360.0)]
    time_limit: f64,
    /// Output file (or directory for several instances).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate instance files.
    Gen(GenArgs),
    /// Solve one instance and print the report as JSON.
    Solve(SolveArgs),
    /// Run methods over instance files and write a CSV table.
    Bench(BenchArgs),
    /// Chart a bench CSV as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Tracks per event.
    #[arg(long, conflicts_with = "preset")]
    tracks: Option<usize>,
    /// Draw track counts from a benchmark scale.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Number of events; event `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// With `--preset`, one event per track count of the scale, ascending.
    #[arg(long, requires = "preset")]
    ladder: bool,
    #[arg(long, default_value_t = 7)]
    layers: usize,
    /// Layer spacing, micrometers.
    #[arg(long)]
    spacing: Option<f64>,
    /// Largest direction change per layer, radians.
    #[arg(long)]
    curvature: Option<f64>,
    /// Transverse measurement error half-width, micrometers.
    #[arg(long)]
    jitter: Option<f64>,
    /// Largest initial track angle to the layer axis, radians.
    #[arg(long)]
    polar_angle: Option<f64>,
    /// First-layer area per track, square micrometers.
    #[arg(long)]
    area_per_track: Option<f64>,
    #[arg(long)]
    max_skip: Option<usize>,
    /// Largest turning angle admitted into a triplet, radians.
    #[arg(long)]
    max_turn: Option<f64>,
    /// Largest segment angle to the layer axis, radians; negative disables.
    #[arg(long, allow_negative_numbers = true)]
    max_axis_angle: Option<f64>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    path: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Sa)]
    method: Method,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Debug, Args)]
struct Tuning {
    /// Annealing temperature steps.
    #[arg(long, default_value_t = 100)]
    sweeps: usize,
    /// Independent annealing runs.
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Largest per-layer hit count of a component the exact search accepts.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    exact_cap: usize,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Instance files or directories of `.tf` files.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "sa,exact,greedy")]
    methods: Vec<Method>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Debug, Args)]
struct PlotArgs {
    csv: PathBuf,
    #[arg(long = "y", value_enum, default_value_t = PlotAxis::Gap)]
    y: PlotAxis,
}

/// Run the command line; returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    if !(g.time_limit >= 0.0 && g.time_limit.is_finite()) {
        return Err(Error::InvalidConfig("time limit must be a non-negative number of seconds".into()));
    }
    match &cli.command {
        Command::Gen(a) => gen(g, a),
        Command::Solve(a) => solve(g, a),
        Command::Bench(a) => bench(g, a),
        Command::Plot(a) => {
            let out = g
                .out
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("plot needs --out".into()))?;
            plot(&a.csv, a.y, out)
        }
    }
}

fn gen(g: &Global, a: &GenArgs) -> Result<()> {
    let mut base = GeneratorConfig {
        num_layers: a.layers,
        seed: g.seed,
        preset: a.preset,
        ..GeneratorConfig::default()
    };
    if let Some(v) = a.spacing {
        base.layer_spacing = v;
    }
    if let Some(v) = a.curvature {
        base.curvature = v;
    }
    if let Some(v) = a.jitter {
        base.jitter = v;
    }
    if let Some(v) = a.polar_angle {
        base.max_polar_angle = v;
    }
    if let Some(v) = a.area_per_track {
        base.area_per_track = v;
    }
    let mut filter = FilterConfig::default();
    if let Some(v) = a.max_skip {
        filter.max_skip = v;
    }
    if let Some(v) = a.max_turn {
        filter.max_turning_angle = v;
    }
    if let Some(v) = a.max_axis_angle {
        filter.max_axis_angle = (v >= 0.0).then_some(v);
    }
    base.filter = filter;

    let configs: Vec<GeneratorConfig> = match (a.tracks, a.preset) {
        (_, Some(p)) if a.ladder => p
            .track_counts()
            .into_iter()
            .enumerate()
            .map(|(i, n)| GeneratorConfig { num_tracks: n, seed: g.seed + i as u64, ..base })
            .collect(),
        (Some(n), _) => (0..a.count)
            .map(|i| GeneratorConfig { num_tracks: n, seed: g.seed + i as u64, ..base })
            .collect(),
        (None, Some(p)) => (0..a.count)
            .map(|i| {
                let seed = g.seed + i as u64;
                GeneratorConfig { num_tracks: GeneratorConfig::from_preset(p, seed).num_tracks, seed, ..base }
            })
            .collect(),
        (None, None) => return Err(Error::InvalidConfig("gen needs --tracks or --preset".into())),
    };

    let out = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
    if configs.len() == 1 && !out.is_dir() {
        let inst = generate_event(&configs[0])?;
        if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        write_instance(&inst, &out)?;
        println!("{}", out.display());
        return Ok(());
    }
    fs::create_dir_all(&out)?;
    for c in &configs {
        let inst = generate_event(c)?;
        let path = out.join(format!("event_n{:03}_s{}.tf", c.num_tracks, c.seed));
        write_instance(&inst, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn schedule(g: &Global, t: &Tuning) -> AnnealSchedule {
    AnnealSchedule {
        sweeps: t.sweeps,
        restarts: t.restarts,
        seed: g.seed,
        ..AnnealSchedule::default()
    }
}

fn solve(g: &Global, a: &SolveArgs) -> Result<()> {
    let inst = read_instance(&a.path)?;
    let limit = Duration::from_secs_f64(g.time_limit);
    let report: SolveReport = match a.method {
        Method::Exact => {
            let opts = ExactOptions {
                max_hits_per_layer: a.tuning.exact_cap,
                prune: true,
                deadline: Some(Instant::now() + limit),
            };
            exact_search_with(&inst, g.alpha, &opts)?
        }
        Method::Greedy => greedy_baseline(&inst, g.alpha)?,
        Method::Sa => {
            let model = build_qubm(&inst, g.alpha, g.gamma)?;
            anneal_instance(&inst, &model, &schedule(g, &a.tuning), Some(Instant::now() + limit))?
        }
    };
    let text = report_json(&a.path, &report);
    match &g.out {
        Some(p) => fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

/// The report with 1-based hit ids, matching the instance file.
fn report_json(path: &Path, r: &SolveReport) -> String {
    let tracks = r
        .tracks
        .as_ref()
        .map(|ts| ts.iter().map(|t| t.iter().map(|h| h + 1).collect::<Vec<_>>()).collect::<Vec<_>>());
    let selected: Vec<usize> = r.assignment.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i + 1).collect();
    let v = json!({
        "instance": path.display().to_string(),
        "method": r.method,
        "objective": r.objective,
        "energy": r.energy,
        "feasible": r.feasible,
        "selected_segments": selected,
        "tracks": tracks,
        "wall_time": r.wall_time,
        "seed": r.seed,
        "raw": r.raw,
    });
    serde_json::to_string_pretty(&v).expect("report serializes")
}

fn bench(g: &Global, a: &BenchArgs) -> Result<()> {
    let paths = collect_instance_paths(&a.paths)?;
    let params = BenchParams {
        alpha: g.alpha,
        gamma: g.gamma,
        seed: g.seed,
        time_limit: Duration::from_secs_f64(g.time_limit),
        schedule: schedule(g, &a.tuning),
        exact_cap: a.tuning.exact_cap,
    };
    let table = run_bench(&paths, &a.methods, &params)?;
    let text = format_csv(&table)?;
    match &g.out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(cli_main(["trackfind", "--bogus"]), 1);
        assert_eq!(cli_main(["trackfind", "gen", "--tracks", "x"]), 1);
        assert_eq!(cli_main(["trackfind"]), 1);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(cli_main(["trackfind", "--help"]), 0);
    }

    #[test]
    fn runtime_errors_exit_two() {
        assert_eq!(cli_main(["trackfind", "solve", "/nonexistent/x.tf"]), 2);
        assert_eq!(cli_main(["trackfind", "gen"]), 2);
    }
}
