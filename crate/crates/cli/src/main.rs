//! `tis`: generate graphs, count triangles, and run the TIS estimator.
//!
//! Every subcommand prints one JSON document on stdout (or to `--out`).
//! Exit code 1 means bad input or a violated contract, exit code 2 means an
//! estimator run failed and the failure report was written.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tis_core::budget::bound_shape;
use tis_core::graph::{format_edge_list, load_edge_list, save_edge_list};
use tis_core::report::{relative_error, GraphMeta, RunReport, RunStatus};
use tis_core::scalar::ceil_log2;
use tis_core::{
    count_triangles_brute, estimate_triangles, generate, Estimate, EstimatorConfig, Exact, GeneratorSpec, Graph,
    Preset, TisOracle,
};

#[derive(Parser)]
#[command(name = "tis", version, about = "Triangle estimation with tripartite independent set queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Count triangles and Δ_E by brute force.
    Brute {
        file: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run the estimator once and print a run report.
    Estimate {
        file: PathBuf,
        #[command(flatten)]
        est: EstimateArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Query counts over a family of graphs of growing n.
    Bench(BenchArgs),
    /// Repeat the estimator over consecutive seeds and report the success rate.
    Sweep {
        file: PathBuf,
        /// Number of runs.
        #[arg(short = 'R', long = "runs", default_value_t = 100)]
        runs: u64,
        /// A run succeeds when its relative error is at most this; defaults to ε.
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        est: EstimateArgs,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args)]
struct OutArg {
    /// Write the document to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    ErdosRenyi,
    Planted,
    UnitDistance,
    CliqueUnion,
    Circulant,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Edge probability (erdos-renyi).
    #[arg(long)]
    p: Option<f64>,
    /// Triangles per edge (planted, circulant) or clique size minus 2 (clique-union).
    #[arg(long)]
    d: Option<usize>,
    /// Number of books (planted).
    #[arg(long)]
    gadgets: Option<usize>,
    /// Clique size (clique-union).
    #[arg(long)]
    clique_size: Option<usize>,
    /// Number of cliques (clique-union).
    #[arg(long)]
    cliques: Option<usize>,
    /// Degree cap (circulant).
    #[arg(long)]
    max_degree: Option<usize>,
    /// File with one `x y` point per line (unit-distance).
    #[arg(long)]
    points: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, env = "RNG_SEED", default_value_t = 0)]
    seed: u64,
    /// Edge-list destination; without it the edge list goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, default_value_t = 0.2)]
    eps: f64,
    /// Asserted bound on Δ_E.
    #[arg(long, default_value_t = 4)]
    d: u64,
    #[arg(long, default_value = "practical")]
    preset: Preset,
    #[arg(long, env = "RNG_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tau: Option<u64>,
    #[arg(long)]
    gamma: Option<u64>,
    #[arg(long)]
    n_cap: Option<u64>,
    #[arg(long)]
    rounds_factor: Option<f64>,
    /// Run the estimator in exact rational arithmetic.
    #[arg(long)]
    exact: bool,
    /// Record wall-clock time. Off by default so reports are reproducible.
    #[arg(long)]
    timing: bool,
}

impl EstimateArgs {
    fn config(&self, seed: u64) -> EstimatorConfig {
        let mut cfg = EstimatorConfig::with_preset(self.preset, self.eps, self.d, seed);
        cfg.tau_override = self.tau;
        cfg.gamma_override = self.gamma;
        cfg.n_cap_override = self.n_cap;
        cfg.rounds_factor_override = self.rounds_factor;
        cfg
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Graph sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [64usize, 128, 256, 512])]
    ns: Vec<usize>,
    #[command(flatten)]
    family: FamilyArgs,
    /// Estimator runs per graph.
    #[arg(long, default_value_t = 5)]
    runs: u64,
    #[arg(long, default_value_t = 0.2)]
    eps: f64,
    #[arg(long, default_value = "practical")]
    preset: Preset,
    #[arg(long, env = "RNG_SEED", default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

/// Exit status of a subcommand that completed.
enum Status {
    Ok,
    RunFailure,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            eprintln!("error: {}", first_line(&msg));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::RunFailure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

fn first_line(s: &str) -> &str {
    s.lines().find(|l| !l.trim().is_empty()).unwrap_or(s).trim_start_matches("error: ")
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Brute { file, out } => {
            let g = load(&file)?;
            let s = count_triangles_brute(&g);
            let doc = BruteDoc { n: g.n(), edges: g.edge_count(), t: s.t, delta_e: s.delta_e };
            emit(&doc, out.out.as_deref())?;
            Ok(Status::Ok)
        }
        Command::Estimate { file, est, out } => {
            let g = load(&file)?;
            let report = estimate_once(&g, &GraphMeta::of(&g), &est, est.config(est.seed))?;
            emit(&report, out.out.as_deref())?;
            Ok(match report.status {
                RunStatus::Ok => Status::Ok,
                RunStatus::RunFailure => Status::RunFailure,
            })
        }
        Command::Sweep { file, runs, tolerance, est, out } => cmd_sweep(&file, runs, tolerance, &est, out.out.as_deref()),
        Command::Bench(args) => cmd_bench(args),
    }
}

#[derive(Serialize)]
struct BruteDoc {
    n: usize,
    edges: usize,
    t: u64,
    delta_e: u64,
}

#[derive(Serialize)]
struct GenerateDoc<'a> {
    path: &'a Path,
    spec: &'a GeneratorSpec,
    seed: u64,
    graph: GraphMeta,
}

fn require<T>(v: Option<T>, flag: &str, family: &str) -> Result<T> {
    v.with_context(|| format!("--{flag} is required for family {family}"))
}

fn family_spec(n: Option<usize>, f: &FamilyArgs) -> Result<GeneratorSpec> {
    let need_n = |name| require(n, "n", name);
    Ok(match f.family {
        Family::ErdosRenyi => GeneratorSpec::ErdosRenyi { n: need_n("erdos-renyi")?, p: require(f.p, "p", "erdos-renyi")? },
        Family::Planted => GeneratorSpec::Planted {
            n: need_n("planted")?,
            d: require(f.d, "d", "planted")?,
            gadgets: require(f.gadgets, "gadgets", "planted")?,
        },
        Family::CliqueUnion => GeneratorSpec::CliqueUnion {
            n: need_n("clique-union")?,
            clique_size: require(f.clique_size, "clique-size", "clique-union")?,
            cliques: require(f.cliques, "cliques", "clique-union")?,
        },
        Family::Circulant => {
            let n = need_n("circulant")?;
            GeneratorSpec::Circulant { n, d: require(f.d, "d", "circulant")?, max_degree: f.max_degree.unwrap_or(n) }
        }
        Family::UnitDistance => {
            let path = require(f.points.as_ref(), "points", "unit-distance")?;
            GeneratorSpec::UnitDistance { points: read_points(path)? }
        }
    })
}

/// The family at size `n` for `bench`, filling in size-dependent defaults:
/// as many books or cliques as fit, and a degree cap of n.
fn bench_spec(n: usize, f: &FamilyArgs) -> Result<GeneratorSpec> {
    Ok(match f.family {
        Family::Planted => {
            let d = f.d.unwrap_or(4);
            GeneratorSpec::Planted { n, d, gadgets: f.gadgets.unwrap_or(n / (d + 2)) }
        }
        Family::CliqueUnion => {
            let size = f.clique_size.unwrap_or(6);
            GeneratorSpec::CliqueUnion { n, clique_size: size, cliques: f.cliques.unwrap_or(n / size) }
        }
        Family::Circulant => GeneratorSpec::Circulant { n, d: f.d.unwrap_or(4), max_degree: f.max_degree.unwrap_or(n) },
        Family::ErdosRenyi => GeneratorSpec::ErdosRenyi { n, p: f.p.unwrap_or(4.0 / n as f64) },
        Family::UnitDistance => bail!("bench does not support unit-distance; it has no size parameter"),
    })
}

fn read_points(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let xy: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .with_context(|| format!("{}:{}: invalid number", path.display(), i + 1))?;
        let [x, y] = xy[..] else {
            bail!("{}:{}: expected \"x y\"", path.display(), i + 1);
        };
        points.push((x, y));
    }
    Ok(points)
}

fn cmd_generate(args: GenerateArgs) -> Result<Status> {
    let spec = family_spec(args.n, &args.family)?;
    let g = generate(&spec, args.seed)?;
    match &args.out {
        Some(path) => {
            save_edge_list(&g, path)?;
            let doc = GenerateDoc { path, spec: &spec, seed: args.seed, graph: GraphMeta::of(&g) };
            emit(&doc, None)?;
        }
        None => print!("{}", format_edge_list(&g)),
    }
    Ok(Status::Ok)
}

/// Runs the estimator on a fresh oracle. Estimator errors become a
/// failure report; invalid configurations are returned as errors.
fn estimate_once(g: &Graph, meta: &GraphMeta, est: &EstimateArgs, cfg: EstimatorConfig) -> Result<RunReport> {
    cfg.validate()?;
    let o = TisOracle::new(g.clone());
    let start = Instant::now();
    let result = if est.exact {
        estimate_triangles::<Exact>(&o, &cfg).map(|r| RunReport::success(meta.clone(), &cfg, &r, None))
    } else {
        estimate_triangles::<f64>(&o, &cfg).map(|r: Estimate| RunReport::success(meta.clone(), &cfg, &r, None))
    };
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let mut report = match result {
        Ok(r) => r,
        Err(e @ tis_core::Error::Contract(_)) | Err(e @ tis_core::Error::InvalidParameter(_)) => return Err(e.into()),
        Err(e) => RunReport::failure(meta.clone(), &cfg, o.snapshot_ledger(), e.to_string(), None),
    };
    report.wall_time_ms = est.timing.then_some(ms);
    Ok(report)
}

#[derive(Serialize)]
struct SweepDoc {
    graph: GraphMeta,
    config: EstimatorConfig,
    runs: u64,
    tolerance: f64,
    successes: u64,
    failures: u64,
    success_fraction: f64,
    mean_estimate: Option<f64>,
    max_relative_error: Option<f64>,
    mean_queries: f64,
    max_queries: u64,
    seeds: Vec<u64>,
}

fn cmd_sweep(file: &Path, runs: u64, tolerance: Option<f64>, est: &EstimateArgs, out: Option<&Path>) -> Result<Status> {
    if runs == 0 {
        bail!("-R must be at least 1");
    }
    let g = load(file)?;
    let meta = GraphMeta::of(&g);
    let tolerance = tolerance.unwrap_or(est.eps);
    let seeds: Vec<u64> = (0..runs).map(|i| est.seed.wrapping_add(i)).collect();
    let (mut successes, mut failures, mut total_q, mut max_q) = (0, 0, 0u64, 0u64);
    let mut estimates = Vec::new();
    let mut max_err: Option<f64> = None;
    for &seed in &seeds {
        let r = estimate_once(&g, &meta, est, est.config(seed))?;
        total_q += r.ledger.total;
        max_q = max_q.max(r.ledger.total);
        match r.estimate {
            Some(e) => {
                let err = relative_error(e, meta.t_brute);
                if err <= tolerance {
                    successes += 1;
                }
                max_err = Some(max_err.map_or(err, |m| m.max(err)));
                estimates.push(e);
            }
            None => failures += 1,
        }
    }
    let doc = SweepDoc {
        graph: meta,
        config: est.config(est.seed),
        runs,
        tolerance,
        successes,
        failures,
        success_fraction: successes as f64 / runs as f64,
        mean_estimate: (!estimates.is_empty()).then(|| estimates.iter().sum::<f64>() / estimates.len() as f64),
        max_relative_error: max_err,
        mean_queries: total_q as f64 / runs as f64,
        max_queries: max_q,
        seeds,
    };
    emit(&doc, out)?;
    Ok(if failures > 0 { Status::RunFailure } else { Status::Ok })
}

#[derive(Serialize)]
struct BenchRow {
    n: usize,
    spec: GeneratorSpec,
    t_brute: u64,
    delta_e: u64,
    log_n: u32,
    /// d²·⌈log₂ n⌉¹⁸/ε⁴ with d = Δ_E (at least 1).
    curve: f64,
    exhaustive_cost: u64,
    mean_queries: f64,
    max_queries: u64,
    mean_relative_error: f64,
    failures: u64,
}

#[derive(Serialize)]
struct BenchDoc {
    eps: f64,
    preset: Preset,
    runs: u64,
    rows: Vec<BenchRow>,
}

fn cmd_bench(args: BenchArgs) -> Result<Status> {
    if args.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let mut rows = Vec::new();
    let mut any_failed = false;
    for &n in &args.ns {
        let spec = bench_spec(n, &args.family)?;
        let g = generate(&spec, args.seed)?;
        let meta = GraphMeta::of(&g);
        let d = meta.delta_e.max(1);
        let est = EstimateArgs {
            eps: args.eps,
            d,
            preset: args.preset,
            seed: args.seed,
            tau: None,
            gamma: None,
            n_cap: None,
            rounds_factor: None,
            exact: false,
            timing: false,
        };
        let (mut total_q, mut max_q, mut err_sum, mut failures) = (0u64, 0u64, 0f64, 0u64);
        for i in 0..args.runs {
            let r = estimate_once(&g, &meta, &est, est.config(args.seed.wrapping_add(i)))?;
            total_q += r.ledger.total;
            max_q = max_q.max(r.ledger.total);
            match r.relative_error {
                Some(e) => err_sum += e,
                None => failures += 1,
            }
        }
        any_failed |= failures > 0;
        let eps = Exact::new(((args.eps * 1e9).round() as i64).into(), 1_000_000_000.into());
        let nn = n as u64;
        rows.push(BenchRow {
            n,
            spec,
            t_brute: meta.t_brute,
            delta_e: meta.delta_e,
            log_n: ceil_log2(n),
            curve: tis_core::Scalar::to_f64_lossy(&bound_shape(nn, d, &eps)),
            exhaustive_cost: if nn < 3 { 0 } else { nn * (nn - 1) * (nn - 2) / 6 },
            mean_queries: total_q as f64 / args.runs as f64,
            max_queries: max_q,
            mean_relative_error: err_sum / (args.runs - failures).max(1) as f64,
            failures,
        });
    }
    let doc = BenchDoc { eps: args.eps, preset: args.preset, runs: args.runs, rows };
    emit(&doc, args.out.out.as_deref())?;
    Ok(if any_failed { Status::RunFailure } else { Status::Ok })
}

fn load(path: &Path) -> Result<Graph> {
    match load_edge_list(path) {
        Err(tis_core::Error::Io(e)) => Err(e).with_context(|| format!("cannot read {}", path.display())),
        other => Ok(other?),
    }
}

fn emit<T: Serialize>(doc: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)? + "\n";
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
