use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use pasco_core::clustering::{ClusterMethod, ClustererConfig};
use pasco_core::coarsening::{coarsen_to_target, CoarseningConfig, SamplingRule};
use pasco_core::exec::Executor;
use pasco_core::experiments::{run_recipe, Recipe, RecipeOptions};
use pasco_core::fusion::{align_and_fuse, AlignMethod, FusionConfig};
use pasco_core::generators::{gmm_toy, ssbm_sample, SsbmParams};
use pasco_core::io::{
    read_edge_list, read_partition, write_edge_list, write_file, write_gmm_csv, write_partition, NodeIds,
};
use pasco_core::metrics::{score_partition, ScoreKind};
use pasco_core::partition::Partition;
use pasco_core::pipeline::{run_pasco_with, timing_csv, PascoConfig};

#[derive(Parser, Debug)]
#[command(name = "pasco", version, about = "Parallel randomized coarsening overlay for graph clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coarsen, cluster and fuse an edge-list graph.
    Cluster(ClusterArgs),
    /// Coarsen a graph once and write the coarsened graph.
    Coarsen(CoarsenArgs),
    /// Fuse several partition files into one.
    Fuse(FuseArgs),
    /// Score a partition against its graph and an optional truth.
    Score(ScoreArgs),
    /// Generate synthetic data.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run a named experiment recipe and write its CSV tables.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    /// Fused partition, `node cluster` per line [default: INPUT with a
    /// `.partition` infix].
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    truth: Option<PathBuf>,
    /// JSON run report [default: stdout].
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-phase timing CSV.
    #[arg(long)]
    timings: Option<PathBuf>,
    #[arg(long, default_value_t = 10.0)]
    rho: f64,
    #[arg(long, default_value_t = 10)]
    repetitions: usize,
    #[arg(long, default_value = "greedy-modularity")]
    clusterer: ClusterMethod,
    /// Cluster count for the spectral clusterer.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "ot")]
    align: AlignMethod,
    #[arg(long)]
    kbar: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value = "uniform-node-unvisited")]
    sampling_rule: SamplingRule,
    /// Comma-separated subset of ami,modularity,gncut,dl.
    #[arg(long, value_delimiter = ',')]
    scores: Vec<ScoreKind>,
}

#[derive(Args, Debug)]
struct CoarsenArgs {
    #[arg(long)]
    input: PathBuf,
    /// Coarsened graph as an edge list over hypernode ids.
    #[arg(long)]
    output: PathBuf,
    /// Coarsening table, `node hypernode` per line.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, default_value_t = 10.0)]
    rho: f64,
    #[arg(long, default_value = "uniform-node-unvisited")]
    sampling_rule: SamplingRule,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct FuseArgs {
    /// Partition files; repeat the flag for each.
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value = "ot")]
    align: AlignMethod,
    #[arg(long)]
    kbar: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    /// Graph edge list.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "ami,modularity,gncut,dl")]
    scores: Vec<ScoreKind>,
    /// Write the JSON scores here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// Symmetric stochastic block model graph.
    Ssbm(SsbmArgs),
    /// Three-component Gaussian mixture toy data as CSV.
    Gmm(GmmArgs),
}

#[derive(Args, Debug)]
struct SsbmArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Degree coefficient; the expected degree is `d ln n`.
    #[arg(long, default_value_t = 1.5)]
    d: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
    /// Planted blocks, `node block` per line [default: OUTPUT with a
    /// `.truth` infix].
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Skip the connectivity rejection loop.
    #[arg(long)]
    allow_disconnected: bool,
}

#[derive(Args, Debug)]
struct GmmArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    name: Recipe,
    /// Directory receiving the CSV tables.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Small instances, for smoke runs.
    #[arg(long)]
    quick: bool,
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<pasco_core::error::PascoError> for Failure {
    fn from(e: pasco_core::error::PascoError) -> Self {
        Failure::Runtime(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn read_truth(path: Option<&Path>, ids: &NodeIds) -> anyhow::Result<Option<Partition>> {
    path.map(|p| {
        read_partition(p, Some(ids))
            .map(|(t, _)| t)
            .with_context(|| format!("reading truth {}", p.display()))
    })
    .transpose()
}

/// `dir/g.txt` with infix `truth` becomes `dir/g.truth.txt`.
fn sibling(path: &Path, infix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{infix}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{infix}"),
    };
    path.with_file_name(name)
}

fn write_json(path: Option<&Path>, json: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => write_file(p, |buf| {
            buf.extend_from_slice(json.as_bytes());
            buf.push(b'\n');
            Ok(())
        })
        .with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn cmd_cluster(a: ClusterArgs) -> Result<(), Failure> {
    let clusterer = ClustererConfig {
        method: a.clusterer,
        k: a.k,
        ..ClustererConfig::greedy_modularity()
    };
    let cfg = PascoConfig {
        rho: a.rho,
        repetitions: a.repetitions,
        clusterer,
        align_method: a.align,
        kbar_override: a.kbar,
        master_seed: a.seed,
        workers: a.workers,
        sampling_rule: a.sampling_rule,
        scores: a.scores,
        ..Default::default()
    };
    cfg.validate().map_err(usage)?;
    let (g, ids) = read_edge_list(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let truth = read_truth(a.truth.as_deref(), &ids)?;
    let (fused, mut report) = run_pasco_with(&g, &cfg, truth.as_ref(), &Executor::new(cfg.workers))?;
    let output = a.output.unwrap_or_else(|| sibling(&a.input, "partition"));
    write_file(&output, |buf| write_partition(buf, &fused, &ids))?;
    report.fused_partition_path = Some(output.display().to_string());
    if let Some(path) = &a.timings {
        let csv = timing_csv(&report);
        write_file(path, |buf| {
            buf.extend_from_slice(csv.as_bytes());
            Ok(())
        })?;
    }
    write_json(a.report.as_deref(), &report.to_json())?;
    Ok(())
}

fn cmd_coarsen(a: CoarsenArgs) -> Result<(), Failure> {
    let cfg = CoarseningConfig {
        rho: a.rho,
        sampling_rule: a.sampling_rule,
        seed: a.seed,
        ..Default::default()
    };
    cfg.validate().map_err(usage)?;
    let (g, ids) = read_edge_list(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let res = coarsen_to_target(&g, &cfg)?;
    let hyper = NodeIds::sequential(res.graph.n());
    write_file(&a.output, |buf| write_edge_list(buf, &res.graph, &hyper))?;
    if let Some(path) = &a.table {
        let table = Partition::with_k(res.table().as_slice().to_vec(), res.graph.n())?;
        write_file(path, |buf| write_partition(buf, &table, &ids))?;
    }
    let summary = serde_json::json!({
        "nodes": g.n(),
        "coarsened_nodes": res.graph.n(),
        "levels": res.levels_used,
        "stop": res.stop,
    });
    println!("{summary}");
    Ok(())
}

fn cmd_fuse(a: FuseArgs) -> Result<(), Failure> {
    let cfg = FusionConfig {
        align_method: a.align,
        kbar_override: a.kbar,
        seed: a.seed,
        ..Default::default()
    };
    cfg.validate().map_err(usage)?;
    if a.workers == 0 {
        return Err(usage(anyhow!("workers must be >= 1")));
    }
    let (first, ids) =
        read_partition(&a.input[0], None).with_context(|| format!("reading {}", a.input[0].display()))?;
    let mut partitions = vec![first];
    for path in &a.input[1..] {
        let (p, _) = read_partition(path, Some(&ids)).with_context(|| format!("reading {}", path.display()))?;
        partitions.push(p);
    }
    let truth = read_truth(a.truth.as_deref(), &ids)?;
    let out = align_and_fuse(&partitions, &cfg, &Executor::new(a.workers))?;
    write_file(&a.output, |buf| write_partition(buf, &out.partition, &ids))?;
    let mut summary = serde_json::to_value(&out).context("serializing fusion outcome")?;
    if let Some(t) = &truth {
        summary["ami"] = pasco_core::metrics::ami(&out.partition, t)?.into();
    }
    let json = serde_json::to_string_pretty(&summary).context("serializing fusion outcome")?;
    write_json(a.report.as_deref(), &json)?;
    Ok(())
}

fn cmd_score(a: ScoreArgs) -> Result<(), Failure> {
    let (g, ids) = read_edge_list(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let (p, _) = read_partition(&a.partition, Some(&ids))
        .with_context(|| format!("reading {}", a.partition.display()))?;
    let truth = read_truth(a.truth.as_deref(), &ids)?;
    if truth.is_none() && a.scores == [ScoreKind::Ami] {
        return Err(usage(anyhow!("AMI needs --truth")));
    }
    let report = score_partition(&g, &p, truth.as_ref(), &a.scores)?;
    let json = serde_json::to_string_pretty(&report).context("serializing scores")?;
    write_json(a.report.as_deref(), &json)?;
    Ok(())
}

fn cmd_gen(c: GenCommand) -> Result<(), Failure> {
    match c {
        GenCommand::Ssbm(a) => {
            let params = SsbmParams {
                require_connected: !a.allow_disconnected,
                ..SsbmParams::new(a.n, a.k, a.d, a.alpha, a.seed)
            };
            params.validate().map_err(usage)?;
            let (g, truth) = ssbm_sample(&params)?;
            let ids = NodeIds::sequential(g.n());
            write_file(&a.output, |buf| write_edge_list(buf, &g, &ids))?;
            let truth_path = a.truth.unwrap_or_else(|| sibling(&a.output, "truth"));
            write_file(&truth_path, |buf| write_partition(buf, &truth, &ids))?;
        }
        GenCommand::Gmm(a) => {
            let data = gmm_toy(a.seed);
            write_file(&a.output, |buf| write_gmm_csv(buf, &data))?;
        }
    }
    Ok(())
}

fn cmd_experiment(a: ExperimentArgs) -> Result<(), Failure> {
    if a.workers == 0 {
        return Err(usage(anyhow!("workers must be >= 1")));
    }
    let opts = RecipeOptions {
        seed: a.seed,
        quick: a.quick,
    };
    let out = run_recipe(a.name, opts, &Executor::new(a.workers))?;
    out.write_to(&a.output)
        .with_context(|| format!("writing tables to {}", a.output.display()))?;
    for t in &out.tables {
        eprintln!("wrote {} ({} rows)", a.output.join(&t.file_name).display(), t.rows.len());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Cluster(a) => {
            if a.clusterer == ClusterMethod::Spectral && a.k.is_none() {
                return Err(usage(anyhow!("--clusterer spectral needs --k")));
            }
            cmd_cluster(a)
        }
        Command::Coarsen(a) => cmd_coarsen(a),
        Command::Fuse(a) => cmd_fuse(a),
        Command::Score(a) => cmd_score(a),
        Command::Gen(c) => cmd_gen(c),
        Command::Experiment(a) => cmd_experiment(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
