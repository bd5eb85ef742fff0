//! Randomized multilevel coarsening by edge contraction.
//!
//! One level draws contraction pairs with an [`EdgeSampler`] and merges them
//! with a union-find until the hypernode count reaches the target or the
//! sampler runs dry. The multilevel driver repeats levels, composing the
//! per-level tables, until the graph has at most `⌊N/ρ⌋` nodes.

mod sampling;
mod union_find;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PascoError, Result};
use crate::graph::WeightedGraph;
use crate::partition::Partition;
use crate::table::{CoarseningChain, CoarseningTable};

pub use sampling::{EdgeSampler, SamplingRule};
pub use union_find::DisjointSets;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseningConfig {
    /// Compression factor ρ ≥ 1.
    pub rho: f64,
    pub sampling_rule: SamplingRule,
    pub seed: u64,
    pub max_levels: usize,
}

impl Default for CoarseningConfig {
    fn default() -> Self {
        CoarseningConfig {
            rho: 10.0,
            sampling_rule: SamplingRule::default(),
            seed: 0,
            max_levels: 50,
        }
    }
}

impl CoarseningConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.rho.is_finite() || self.rho < 1.0 {
            return Err(PascoError::InvalidParameter(format!(
                "compression factor must be finite and >= 1, got {}",
                self.rho
            )));
        }
        if self.max_levels == 0 {
            return Err(PascoError::InvalidParameter("max_levels must be >= 1".into()));
        }
        Ok(())
    }

    /// `⌊N/ρ⌋`, tolerant to representation error in ρ (e.g. `ρ = 1/(1 - 0.7)`).
    pub fn target_size(&self, n: usize) -> usize {
        target_size(n, self.rho)
    }
}

pub fn target_size(n: usize, rho: f64) -> usize {
    (n as f64 / rho + 1e-9).floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    TargetReached,
    /// A level made no contraction (edgeless residual graph).
    Stalled,
    MaxLevels,
}

#[derive(Debug, Clone)]
pub struct CoarseningResult {
    pub graph: WeightedGraph,
    pub chain: CoarseningChain,
    pub levels_used: usize,
    pub stop: StopReason,
    /// Effective contractions per level, as pairs of that level's node ids.
    pub contractions: Vec<Vec<(usize, usize)>>,
}

impl CoarseningResult {
    pub fn table(&self) -> &CoarseningTable {
        self.chain.composed()
    }
}

/// Seeded generator used for one coarsening run.
pub fn coarsening_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct Level {
    table: CoarseningTable,
    contractions: Vec<(usize, usize)>,
}

fn contract_level<R: Rng + ?Sized>(
    g: &WeightedGraph,
    target: usize,
    rule: SamplingRule,
    rng: &mut R,
) -> Level {
    let n = g.n();
    let mut sets = DisjointSets::new(n);
    let mut count = n;
    let mut contractions = Vec::new();
    if count > target {
        let mut sampler = EdgeSampler::new(g, rule, rng);
        while count > target {
            let Some((u, v)) = sampler.next_edge(rng) else {
                break;
            };
            if sets.union(u, v).is_some() {
                count -= 1;
                contractions.push((u, v));
            }
        }
    }
    let roots = sets.roots();
    let table = CoarseningTable::relabel_consecutive(&roots)
        .unwrap_or_else(|_| CoarseningTable::identity(0));
    debug_assert_eq!(table.n_dst(), count);
    Level {
        table,
        contractions,
    }
}

/// One level of contraction down towards `target` hypernodes.
pub fn coarsen_one_level<R: Rng + ?Sized>(
    g: &WeightedGraph,
    target: usize,
    rule: SamplingRule,
    rng: &mut R,
) -> Result<(CoarseningTable, WeightedGraph)> {
    if target < 1 || target >= g.n() {
        return Err(PascoError::InvalidParameter(format!(
            "one-level target must lie in [1, {}), got {target}",
            g.n()
        )));
    }
    let level = contract_level(g, target, rule, rng);
    let coarse = g.coarsen(&level.table)?;
    Ok((level.table, coarse))
}

/// Multilevel coarsening to `⌊N/ρ⌋` nodes.
pub fn coarsen_to_target(g: &WeightedGraph, cfg: &CoarseningConfig) -> Result<CoarseningResult> {
    cfg.validate()?;
    let target = cfg.target_size(g.n());
    let mut rng = coarsening_rng(cfg.seed);
    coarsen_to_size(g, target, cfg.sampling_rule, cfg.max_levels, &mut rng)
}

/// Multilevel coarsening to an explicit node count.
pub fn coarsen_to_size<R: Rng + ?Sized>(
    g: &WeightedGraph,
    target: usize,
    rule: SamplingRule,
    max_levels: usize,
    rng: &mut R,
) -> Result<CoarseningResult> {
    if target < 1 {
        return Err(PascoError::InvalidParameter(format!(
            "target size must be >= 1 (graph has {} nodes)",
            g.n()
        )));
    }
    let mut chain = CoarseningChain::new(g.n());
    let mut current = g.clone();
    let mut contractions = Vec::new();
    let mut stop = StopReason::TargetReached;
    while current.n() > target {
        if chain.levels().len() >= max_levels {
            stop = StopReason::MaxLevels;
            break;
        }
        let level = contract_level(&current, target, rule, rng);
        if level.contractions.is_empty() {
            stop = StopReason::Stalled;
            break;
        }
        let next = current.coarsen(&level.table)?;
        debug_assert!(
            (next.total_weight() - current.total_weight()).abs()
                <= 1e-9 * current.total_weight().max(1.0)
        );
        chain.push(level.table)?;
        contractions.push(level.contractions);
        current = next;
    }
    Ok(CoarseningResult {
        graph: current,
        levels_used: chain.levels().len(),
        chain,
        stop,
        contractions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ContractionCounts {
    pub intra: usize,
    pub inter: usize,
}

impl ContractionCounts {
    pub fn total(&self) -> usize {
        self.intra + self.inter
    }

    pub fn intra_fraction(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.intra as f64 / self.total() as f64
        }
    }
}

fn majority(hist: &HashMap<usize, usize>) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    let mut tied = false;
    for (&label, &count) in hist {
        match best {
            Some((_, c)) if count < c => {}
            Some((_, c)) if count == c => tied = true,
            _ => {
                best = Some((label, count));
                tied = false;
            }
        }
    }
    if tied {
        None
    } else {
        best.map(|(l, _)| l)
    }
}

/// Classifies every recorded contraction as intra- or inter-community.
///
/// A contraction is intra when both merged hypernodes have the same strict
/// majority label in `truth`; ties count as inter.
pub fn intra_inter_contraction_counts(
    result: &CoarseningResult,
    truth: &Partition,
) -> Result<ContractionCounts> {
    let n = result.chain.composed().n_src();
    if truth.len() != n {
        return Err(PascoError::SizeMismatch {
            context: "intra_inter_contraction_counts",
            expected: n,
            found: truth.len(),
        });
    }
    let mut counts = ContractionCounts::default();
    let mut composed = CoarseningTable::identity(n);
    for (table, pairs) in result.chain.levels().iter().zip(&result.contractions) {
        let mut hist: Vec<HashMap<usize, usize>> = vec![HashMap::new(); composed.n_dst()];
        for i in 0..n {
            *hist[composed.get(i)].entry(truth.label(i)).or_insert(0) += 1;
        }
        let mut sets = DisjointSets::new(composed.n_dst());
        for &(u, v) in pairs {
            let (ru, rv) = (sets.find(u), sets.find(v));
            match (majority(&hist[ru]), majority(&hist[rv])) {
                (Some(a), Some(b)) if a == b => counts.intra += 1,
                _ => counts.inter += 1,
            }
            let root = sets.union(ru, rv).expect("recorded contractions merge distinct sets");
            let other = if root == ru { rv } else { ru };
            let mut small = std::mem::take(&mut hist[other]);
            let mut large = std::mem::take(&mut hist[root]);
            if small.len() > large.len() {
                std::mem::swap(&mut small, &mut large);
            }
            for (label, c) in small {
                *large.entry(label).or_insert(0) += c;
            }
            hist[root] = large;
        }
        composed = composed.compose(table)?;
    }
    Ok(counts)
}
