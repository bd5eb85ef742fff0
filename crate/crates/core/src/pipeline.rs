//! End-to-end overlay: R independent coarsen → cluster → lift replicas,
//! then alignment and fusion of the lifted partitions.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::ClustererConfig;
use crate::coarsening::{coarsen_to_size, target_size, CoarseningConfig, SamplingRule, StopReason};
use crate::error::{PascoError, Result};
use crate::exec::Executor;
use crate::fusion::{align_and_fuse, AlignMethod, FusionConfig, ReferenceInit};
use crate::graph::WeightedGraph;
use crate::metrics::{score_partition, ScoreKind, ScoreReport};
use crate::partition::Partition;

pub const REPORT_SCHEMA: u32 = 1;

/// Stream used by the coarsening generator of every replica; the clusterer
/// consumes stream 0 of the same seed.
const COARSENING_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PascoConfig {
    pub rho: f64,
    pub repetitions: usize,
    pub clusterer: ClustererConfig,
    pub align_method: AlignMethod,
    pub kbar_override: Option<usize>,
    pub master_seed: u64,
    pub workers: usize,
    pub sampling_rule: SamplingRule,
    pub max_levels: usize,
    pub fusion_max_iters: usize,
    pub scores: Vec<ScoreKind>,
}

impl Default for PascoConfig {
    fn default() -> Self {
        PascoConfig {
            rho: 10.0,
            repetitions: 10,
            clusterer: ClustererConfig::greedy_modularity(),
            align_method: AlignMethod::Ot,
            kbar_override: None,
            master_seed: 0,
            workers: 1,
            sampling_rule: SamplingRule::default(),
            max_levels: 50,
            fusion_max_iters: 100,
            scores: Vec::new(),
        }
    }
}

impl PascoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(PascoError::InvalidParameter("repetitions must be >= 1".into()));
        }
        if self.workers == 0 {
            return Err(PascoError::InvalidParameter("workers must be >= 1".into()));
        }
        if self.fusion_max_iters == 0 {
            return Err(PascoError::InvalidParameter("fusion max iterations must be >= 1".into()));
        }
        self.coarsening(0).validate()?;
        self.clusterer.validate()
    }

    fn coarsening(&self, seed: u64) -> CoarseningConfig {
        CoarseningConfig {
            rho: self.rho,
            sampling_rule: self.sampling_rule,
            seed,
            max_levels: self.max_levels,
        }
    }
}

/// Seed of replica `r`: `master_seed + r` (wrapping).
pub fn replica_seed(master_seed: u64, r: usize) -> u64 {
    master_seed.wrapping_add(r as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaReport {
    pub index: usize,
    pub seed: u64,
    pub coarsened_size: usize,
    pub levels: usize,
    pub stop: Option<StopReason>,
    pub k: usize,
    pub coarsen_secs: f64,
    pub cluster_secs: f64,
    pub lift_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionReport {
    pub kbar_initial: usize,
    pub kbar: usize,
    pub iterations: usize,
    pub converged: bool,
    pub single_cluster_replicas: Vec<usize>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub schema: u32,
    pub config: PascoConfig,
    pub nodes: usize,
    pub target_size: usize,
    pub replicas: Vec<ReplicaReport>,
    pub fusion: FusionReport,
    pub scores: ScoreReport,
    pub wall_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fused_partition_path: Option<String>,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct ReplicaRun {
    partition: Result<Partition>,
    report: ReplicaReport,
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn run_replica(g: &WeightedGraph, cfg: &PascoConfig, target: usize, r: usize) -> ReplicaRun {
    let seed = replica_seed(cfg.master_seed, r);
    let mut report = ReplicaReport {
        index: r,
        seed,
        coarsened_size: g.n(),
        levels: 0,
        stop: None,
        k: 0,
        coarsen_secs: 0.0,
        cluster_secs: 0.0,
        lift_secs: 0.0,
        error: None,
    };
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(COARSENING_STREAM);
    let coarse = coarsen_to_size(g, target, cfg.sampling_rule, cfg.max_levels, &mut rng);
    report.coarsen_secs = secs(t.elapsed());
    let coarse = match coarse {
        Ok(c) => c,
        Err(e) => {
            report.error = Some(e.to_string());
            return ReplicaRun {
                partition: Err(PascoError::replica(r, e)),
                report,
            };
        }
    };
    report.coarsened_size = coarse.graph.n();
    report.levels = coarse.levels_used;
    report.stop = Some(coarse.stop);

    let t = Instant::now();
    let clustered = cfg.clusterer.run(&coarse.graph, seed);
    report.cluster_secs = secs(t.elapsed());
    let t = Instant::now();
    let lifted = clustered.and_then(|p| coarse.table().lift(&p));
    report.lift_secs = secs(t.elapsed());
    match &lifted {
        Ok(p) => report.k = p.k(),
        Err(e) => report.error = Some(e.to_string()),
    }
    ReplicaRun {
        partition: lifted.map_err(|e| PascoError::replica(r, e)),
        report,
    }
}

/// Runs the overlay on `g`. Scores listed in `cfg.scores` are computed on
/// the fused partition; AMI and relative differences need `truth`.
pub fn run_pasco(
    g: &WeightedGraph,
    cfg: &PascoConfig,
    truth: Option<&Partition>,
) -> Result<(Partition, PipelineReport)> {
    run_pasco_with(g, cfg, truth, &Executor::new(cfg.workers))
}

pub fn run_pasco_with(
    g: &WeightedGraph,
    cfg: &PascoConfig,
    truth: Option<&Partition>,
    exec: &Executor,
) -> Result<(Partition, PipelineReport)> {
    cfg.validate()?;
    if g.n() == 0 {
        return Err(PascoError::Empty("graph"));
    }
    let wall = Instant::now();
    let target = target_size(g.n(), cfg.rho);
    if target < 1 {
        return Err(PascoError::InvalidParameter(format!(
            "compression factor {} exceeds node count {}",
            cfg.rho,
            g.n()
        )));
    }
    let runs = exec.map(cfg.repetitions, |r| run_replica(g, cfg, target, r));
    let mut partitions = Vec::with_capacity(runs.len());
    let mut replicas = Vec::with_capacity(runs.len());
    let mut last_error = None;
    for run in runs {
        match run.partition {
            Ok(p) => partitions.push(p),
            Err(e) => {
                log::warn!("{e}");
                last_error = Some(e);
            }
        }
        replicas.push(run.report);
    }
    if partitions.is_empty() {
        log::error!("all {} replicas failed; last error: {:?}", cfg.repetitions, last_error);
        return Err(PascoError::AllReplicasFailed(cfg.repetitions));
    }

    let t = Instant::now();
    let fusion_cfg = FusionConfig {
        align_method: cfg.align_method,
        max_iters: cfg.fusion_max_iters,
        kbar_override: cfg.kbar_override,
        init: ReferenceInit::Heuristic,
        seed: cfg.master_seed,
    };
    let fused = align_and_fuse(&partitions, &fusion_cfg, exec)?;
    let fusion_secs = secs(t.elapsed());
    let wall_secs = secs(wall.elapsed());

    let scores = if cfg.scores.is_empty() {
        ScoreReport::default()
    } else {
        score_partition(g, &fused.partition, truth, &cfg.scores)?
    };
    let report = PipelineReport {
        schema: REPORT_SCHEMA,
        config: cfg.clone(),
        nodes: g.n(),
        target_size: target,
        replicas,
        fusion: FusionReport {
            kbar_initial: fused.kbar_initial,
            kbar: fused.kbar_final,
            iterations: fused.iterations,
            converged: fused.converged,
            single_cluster_replicas: fused.single_cluster_replicas.clone(),
            seconds: fusion_secs,
        },
        scores,
        wall_secs,
        fused_partition_path: None,
    };
    Ok((fused.partition, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Coarsening,
    Clustering,
    Lifting,
    Fusion,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Coarsening => "coarsening",
            Phase::Clustering => "clustering",
            Phase::Lifting => "lifting",
            Phase::Fusion => "fusion",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub phase: Phase,
    /// `None` for phases that are not per replica.
    pub replica: Option<usize>,
    pub seconds: f64,
}

pub fn timing_breakdown(report: &PipelineReport) -> Vec<TimingRow> {
    let mut rows = Vec::with_capacity(3 * report.replicas.len() + 1);
    for r in &report.replicas {
        for (phase, seconds) in [
            (Phase::Coarsening, r.coarsen_secs),
            (Phase::Clustering, r.cluster_secs),
            (Phase::Lifting, r.lift_secs),
        ] {
            rows.push(TimingRow {
                phase,
                replica: Some(r.index),
                seconds,
            });
        }
    }
    rows.push(TimingRow {
        phase: Phase::Fusion,
        replica: None,
        seconds: report.fusion.seconds,
    });
    rows
}

/// CSV with header `phase,replica,seconds`; the fusion row has replica `all`.
pub fn timing_csv(report: &PipelineReport) -> String {
    let mut out = String::from("phase,replica,seconds\n");
    for row in timing_breakdown(report) {
        let replica = row.replica.map_or_else(|| "all".to_string(), |r| r.to_string());
        out.push_str(&format!("{},{},{:.6}\n", row.phase.name(), replica, row.seconds));
    }
    out
}
