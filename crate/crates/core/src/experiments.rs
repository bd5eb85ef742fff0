//! Named experiment recipes producing CSV tables.
//!
//! Every recipe is a function of explicit parameters; [`run_recipe`] wires
//! them to default or quick presets. Tables that hold wall-clock timings are
//! kept separate from quality tables, which are reproducible bit for bit.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::clustering::ClustererConfig;
use crate::coarsening::{coarsen_to_target, intra_inter_contraction_counts, CoarseningConfig, SamplingRule};
use crate::error::{PascoError, Result};
use crate::exec::Executor;
use crate::fusion::{align_and_fuse, AlignMethod, FusionConfig, ReferenceInit};
use crate::generators::{centroid_partitions, gmm_toy, ssbm_sample, SsbmParams};
use crate::metrics::{ami, RsaBasis};
use crate::pipeline::{run_pasco_with, timing_breakdown, PascoConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Recipe {
    Fig4AmiVsAlpha,
    Fig5GmmFusion,
    Fig6Timing,
    RsaCurve,
    PhaseTransition,
}

impl Recipe {
    pub const ALL: [Recipe; 5] = [
        Recipe::Fig4AmiVsAlpha,
        Recipe::Fig5GmmFusion,
        Recipe::Fig6Timing,
        Recipe::RsaCurve,
        Recipe::PhaseTransition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Recipe::Fig4AmiVsAlpha => "fig4-ami-vs-alpha",
            Recipe::Fig5GmmFusion => "fig5-gmm-fusion",
            Recipe::Fig6Timing => "fig6-timing",
            Recipe::RsaCurve => "rsa-curve",
            Recipe::PhaseTransition => "phase-transition",
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Recipe {
    type Err = PascoError;

    fn from_str(s: &str) -> Result<Self> {
        Recipe::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| PascoError::InvalidParameter(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub file_name: String,
    pub header: String,
    pub rows: Vec<String>,
    /// Contents depend on wall-clock measurements.
    pub timing: bool,
}

impl CsvTable {
    fn new(file_name: &str, header: &str, timing: bool) -> Self {
        CsvTable {
            file_name: file_name.to_string(),
            header: header.to_string(),
            rows: Vec::new(),
            timing,
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::with_capacity(self.header.len() + 32 * self.rows.len());
        s.push_str(&self.header);
        s.push('\n');
        for row in &self.rows {
            s.push_str(row);
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentOutput {
    pub tables: Vec<CsvTable>,
}

impl ExperimentOutput {
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for t in &self.tables {
            fs::write(dir.join(&t.file_name), t.render())?;
        }
        Ok(())
    }

    /// Concatenation of all tables without timings.
    pub fn quality_bytes(&self) -> Vec<u8> {
        self.tables
            .iter()
            .filter(|t| !t.timing)
            .flat_map(|t| format!("{}\n{}", t.file_name, t.render()).into_bytes())
            .collect()
    }
}

fn ssbm_alpha(k: usize, factor: f64) -> f64 {
    factor / (k as f64 - 1.0)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct Fig4Params {
    pub n: usize,
    pub k: usize,
    pub d: f64,
    /// `α = factor / (k - 1)`.
    pub alpha_factors: Vec<f64>,
    pub graphs: usize,
    pub rho: f64,
    pub repetitions: usize,
    pub align: AlignMethod,
    pub seed: u64,
}

impl Default for Fig4Params {
    fn default() -> Self {
        Fig4Params {
            n: 10_000,
            k: 20,
            d: 1.5,
            alpha_factors: vec![0.25, 0.5, 0.75, 1.0, 1.25, 1.5],
            graphs: 10,
            rho: 10.0,
            repetitions: 10,
            align: AlignMethod::Ot,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig4Row {
    pub alpha_factor: f64,
    pub alpha: f64,
    pub graph: usize,
    pub ami: f64,
    pub kbar: usize,
    pub iterations: usize,
}

/// AMI of the fused spectral partition against the planted blocks.
pub fn fig4_ami_vs_alpha(p: &Fig4Params, exec: &Executor) -> Result<Vec<Fig4Row>> {
    let mut rows = Vec::new();
    for &factor in &p.alpha_factors {
        let alpha = ssbm_alpha(p.k, factor);
        for graph in 0..p.graphs {
            let seed = p.seed.wrapping_add(graph as u64);
            let (g, truth) = ssbm_sample(&SsbmParams::new(p.n, p.k, p.d, alpha, seed))?;
            let cfg = PascoConfig {
                rho: p.rho,
                repetitions: p.repetitions,
                clusterer: ClustererConfig::spectral(p.k),
                align_method: p.align,
                master_seed: seed,
                workers: exec.workers(),
                ..Default::default()
            };
            let (fused, report) = run_pasco_with(&g, &cfg, None, exec)?;
            rows.push(Fig4Row {
                alpha_factor: factor,
                alpha,
                graph,
                ami: ami(&fused, &truth)?,
                kbar: report.fusion.kbar,
                iterations: report.fusion.iterations,
            });
        }
    }
    Ok(rows)
}

pub fn fig4_tables(p: &Fig4Params, rows: &[Fig4Row]) -> Vec<CsvTable> {
    let mut t = CsvTable::new("fig4_ami_vs_alpha.csv", "alpha,rho,R,align,ami,alpha_factor,graph,kbar,n_iter", false);
    for r in rows {
        t.rows.push(format!(
            "{},{},{},{},{},{},{},{},{}",
            r.alpha, p.rho, p.repetitions, p.align, r.ami, r.alpha_factor, r.graph, r.kbar, r.iterations
        ));
    }
    vec![t]
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct Fig5Params {
    pub seeds: usize,
    pub repetitions: Vec<usize>,
    pub aligns: Vec<AlignMethod>,
    /// Cluster count of the random initial reference.
    pub kbar: usize,
    pub seed: u64,
}

impl Default for Fig5Params {
    fn default() -> Self {
        Fig5Params {
            seeds: 5,
            repetitions: vec![1, 5, 10, 15, 20],
            aligns: vec![AlignMethod::Ot, AlignMethod::LinReg, AlignMethod::ManyToOne],
            kbar: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig5Row {
    pub align: AlignMethod,
    pub repetitions: usize,
    pub seed: usize,
    pub ami: f64,
    pub kbar: usize,
    pub iterations: usize,
}

/// Fusion of random Voronoi partitions of the toy mixture. For each seed the
/// dataset is drawn once; the first `R` of a fixed partition sequence are
/// fused, so larger `R` only adds partitions.
pub fn fig5_gmm_fusion(p: &Fig5Params, exec: &Executor) -> Result<Vec<Fig5Row>> {
    let r_max = p.repetitions.iter().copied().max().unwrap_or(1);
    let mut rows = Vec::new();
    for s in 0..p.seeds {
        let base = p.seed.wrapping_add(s as u64).wrapping_mul(2);
        let data = gmm_toy(base);
        let partitions = centroid_partitions(&data, r_max, base.wrapping_add(1))?;
        for &align in &p.aligns {
            for &r in &p.repetitions {
                let cfg = FusionConfig {
                    align_method: align,
                    kbar_override: Some(p.kbar),
                    init: ReferenceInit::Random,
                    seed: base,
                    ..Default::default()
                };
                let out = align_and_fuse(&partitions[..r], &cfg, exec)?;
                rows.push(Fig5Row {
                    align,
                    repetitions: r,
                    seed: s,
                    ami: ami(&out.partition, &data.truth)?,
                    kbar: out.kbar_final,
                    iterations: out.iterations,
                });
            }
        }
    }
    Ok(rows)
}

pub fn fig5_tables(rows: &[Fig5Row]) -> Vec<CsvTable> {
    let mut t = CsvTable::new("fig5_gmm_fusion.csv", "align,R,seed,ami,kbar,n_iter", false);
    for r in rows {
        t.rows.push(format!(
            "{},{},{},{},{},{}",
            r.align, r.repetitions, r.seed, r.ami, r.kbar, r.iterations
        ));
    }
    vec![t]
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct Fig6Params {
    pub n: usize,
    pub k: usize,
    pub d: f64,
    pub alpha_factor: f64,
    /// Values of `ρ`; the replica count follows `R = ρ`.
    pub rhos: Vec<usize>,
    pub seed: u64,
}

impl Default for Fig6Params {
    fn default() -> Self {
        Fig6Params {
            n: 20_000,
            k: 20,
            d: 1.5,
            alpha_factor: 0.5,
            rhos: vec![5, 10, 15, 20],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig6Row {
    pub rho: usize,
    pub ami: f64,
    pub kbar: usize,
    pub iterations: usize,
    pub wall_secs: f64,
    /// `(phase, replica, seconds)`.
    pub timings: Vec<(String, String, f64)>,
}

pub fn fig6_timing(p: &Fig6Params, exec: &Executor) -> Result<Vec<Fig6Row>> {
    let alpha = ssbm_alpha(p.k, p.alpha_factor);
    let (g, truth) = ssbm_sample(&SsbmParams::new(p.n, p.k, p.d, alpha, p.seed))?;
    let mut rows = Vec::new();
    for &rho in &p.rhos {
        let cfg = PascoConfig {
            rho: rho as f64,
            repetitions: rho,
            clusterer: ClustererConfig::spectral(p.k),
            master_seed: p.seed,
            workers: exec.workers(),
            ..Default::default()
        };
        let (fused, report) = run_pasco_with(&g, &cfg, None, exec)?;
        let timings = timing_breakdown(&report)
            .into_iter()
            .map(|t| {
                let replica = t.replica.map_or_else(|| "all".to_string(), |r| r.to_string());
                (t.phase.name().to_string(), replica, t.seconds)
            })
            .collect();
        rows.push(Fig6Row {
            rho,
            ami: ami(&fused, &truth)?,
            kbar: report.fusion.kbar,
            iterations: report.fusion.iterations,
            wall_secs: report.wall_secs,
            timings,
        });
    }
    Ok(rows)
}

pub fn fig6_tables(rows: &[Fig6Row]) -> Vec<CsvTable> {
    let mut q = CsvTable::new("fig6_quality.csv", "rho,R,ami,kbar,n_iter", false);
    let mut t = CsvTable::new("fig6_timing.csv", "rho,R,phase,replica,seconds", true);
    for r in rows {
        q.rows.push(format!("{},{},{},{},{}", r.rho, r.rho, r.ami, r.kbar, r.iterations));
        for (phase, replica, s) in &r.timings {
            t.rows.push(format!("{},{},{},{},{:.6}", r.rho, r.rho, phase, replica, s));
        }
        t.rows.push(format!("{},{},wall,all,{:.6}", r.rho, r.rho, r.wall_secs));
    }
    vec![q, t]
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct RsaParams {
    pub n: usize,
    pub k: usize,
    pub d: f64,
    /// Absolute `α`.
    pub alpha: f64,
    /// Compression ratios `1 - 1/ρ`.
    pub ratios: Vec<f64>,
    pub seeds: usize,
    pub methods: Vec<SamplingRule>,
    pub seed: u64,
}

impl Default for RsaParams {
    fn default() -> Self {
        RsaParams {
            n: 1000,
            k: 10,
            d: 2.0,
            alpha: 0.1,
            ratios: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            seeds: 10,
            methods: vec![SamplingRule::UniformNodeUnvisited, SamplingRule::HeavyEdgeBaseline],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RsaRow {
    pub method: SamplingRule,
    pub ratio: f64,
    pub seed: usize,
    pub coarsened_size: usize,
    pub rsa: f64,
    pub coarsen_secs: f64,
}

/// RSA of coarsenings at several compression ratios, per sampling rule.
pub fn rsa_curve(p: &RsaParams, exec: &Executor) -> Result<Vec<RsaRow>> {
    let per_seed = exec.map(p.seeds, |s| -> Result<Vec<RsaRow>> {
        let seed = p.seed.wrapping_add(s as u64);
        let (g, _) = ssbm_sample(&SsbmParams::new(p.n, p.k, p.d, p.alpha, seed))?;
        let basis = RsaBasis::new(&g, p.k)?;
        let mut rows = Vec::new();
        for &method in &p.methods {
            for &ratio in &p.ratios {
                let cfg = CoarseningConfig {
                    rho: 1.0 / (1.0 - ratio),
                    sampling_rule: method,
                    seed,
                    max_levels: 50,
                };
                let t = Instant::now();
                let res = coarsen_to_target(&g, &cfg)?;
                let coarsen_secs = t.elapsed().as_secs_f64();
                rows.push(RsaRow {
                    method,
                    ratio,
                    seed: s,
                    coarsened_size: res.graph.n(),
                    rsa: basis.rsa(res.table())?,
                    coarsen_secs,
                });
            }
        }
        Ok(rows)
    });
    let mut rows = Vec::new();
    for r in per_seed {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn rsa_tables(rows: &[RsaRow]) -> Vec<CsvTable> {
    let mut q = CsvTable::new("rsa_curve.csv", "method,ratio,seed,coarsened_size,rsa", false);
    let mut t = CsvTable::new("rsa_timing.csv", "method,ratio,seed,seconds", true);
    for r in rows {
        q.rows.push(format!("{},{},{},{},{}", r.method, r.ratio, r.seed, r.coarsened_size, r.rsa));
        t.rows.push(format!("{},{},{},{:.6}", r.method, r.ratio, r.seed, r.coarsen_secs));
    }
    vec![q, t]
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseParams {
    pub n: usize,
    pub k: usize,
    pub d: f64,
    pub alpha_factors: Vec<f64>,
    pub seeds: usize,
    pub rho: f64,
    pub seed: u64,
}

impl Default for PhaseParams {
    fn default() -> Self {
        PhaseParams {
            n: 2000,
            k: 20,
            d: 1.5,
            alpha_factors: vec![0.25, 0.5, 0.75, 1.0, 1.3, 1.5],
            seeds: 20,
            rho: 10.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRow {
    pub alpha_factor: f64,
    pub alpha: f64,
    pub seed: usize,
    pub intra: usize,
    pub inter: usize,
}

impl PhaseRow {
    pub fn intra_fraction(&self) -> f64 {
        let total = self.intra + self.inter;
        if total == 0 {
            0.0
        } else {
            self.intra as f64 / total as f64
        }
    }
}

/// Intra- vs inter-community contractions of the default coarsening.
pub fn phase_transition(p: &PhaseParams, exec: &Executor) -> Result<Vec<PhaseRow>> {
    let jobs: Vec<(f64, usize)> = p
        .alpha_factors
        .iter()
        .flat_map(|&f| (0..p.seeds).map(move |s| (f, s)))
        .collect();
    exec.map(jobs.len(), |j| {
        let (factor, s) = jobs[j];
        let alpha = ssbm_alpha(p.k, factor);
        let seed = p.seed.wrapping_add(s as u64);
        let (g, truth) = ssbm_sample(&SsbmParams::new(p.n, p.k, p.d, alpha, seed))?;
        let cfg = CoarseningConfig {
            rho: p.rho,
            seed,
            ..Default::default()
        };
        let res = coarsen_to_target(&g, &cfg)?;
        let c = intra_inter_contraction_counts(&res, &truth)?;
        Ok(PhaseRow {
            alpha_factor: factor,
            alpha,
            seed: s,
            intra: c.intra,
            inter: c.inter,
        })
    })
    .into_iter()
    .collect()
}

pub fn phase_tables(rows: &[PhaseRow]) -> Vec<CsvTable> {
    let mut t = CsvTable::new("phase_transition.csv", "alpha,alpha_factor,seed,intra,inter,intra_fraction", false);
    for r in rows {
        t.rows.push(format!(
            "{},{},{},{},{},{}",
            r.alpha,
            r.alpha_factor,
            r.seed,
            r.intra,
            r.inter,
            r.intra_fraction()
        ));
    }
    vec![t]
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RecipeOptions {
    pub seed: u64,
    /// Small instances for smoke runs.
    pub quick: bool,
}

pub fn run_recipe(recipe: Recipe, opts: RecipeOptions, exec: &Executor) -> Result<ExperimentOutput> {
    let seed = opts.seed;
    let tables = match recipe {
        Recipe::Fig4AmiVsAlpha => {
            let mut p = Fig4Params {
                seed,
                ..Default::default()
            };
            if opts.quick {
                p = Fig4Params {
                    n: 1200,
                    k: 6,
                    alpha_factors: vec![0.5, 1.25],
                    graphs: 2,
                    rho: 5.0,
                    repetitions: 3,
                    ..p
                };
            }
            fig4_tables(&p, &fig4_ami_vs_alpha(&p, exec)?)
        }
        Recipe::Fig5GmmFusion => {
            let mut p = Fig5Params {
                seed,
                ..Default::default()
            };
            if opts.quick {
                p.seeds = 2;
                p.repetitions = vec![1, 5];
            }
            fig5_tables(&fig5_gmm_fusion(&p, exec)?)
        }
        Recipe::Fig6Timing => {
            let mut p = Fig6Params {
                seed,
                ..Default::default()
            };
            if opts.quick {
                p = Fig6Params {
                    n: 2000,
                    k: 10,
                    rhos: vec![5, 10],
                    ..p
                };
            }
            fig6_tables(&fig6_timing(&p, exec)?)
        }
        Recipe::RsaCurve => {
            let mut p = RsaParams {
                seed,
                ..Default::default()
            };
            if opts.quick {
                p = RsaParams {
                    n: 300,
                    k: 5,
                    alpha: 0.2,
                    ratios: vec![0.5, 0.9],
                    seeds: 2,
                    ..p
                };
            }
            rsa_tables(&rsa_curve(&p, exec)?)
        }
        Recipe::PhaseTransition => {
            let mut p = PhaseParams {
                seed,
                ..Default::default()
            };
            if opts.quick {
                p = PhaseParams {
                    n: 400,
                    k: 8,
                    alpha_factors: vec![0.5, 1.3],
                    seeds: 3,
                    ..p
                };
            }
            phase_tables(&phase_transition(&p, exec)?)
        }
    };
    Ok(ExperimentOutput { tables })
}
