//! Alignment of partitions onto a reference and barycentric fusion.

mod coupling;
mod lbfgs;
mod quad_ot;
mod transport;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PascoError, Result};
use crate::exec::Executor;
use crate::partition::{contingency, Partition};

pub use coupling::{ClusterCostMatrix, CouplingMatrix};
pub use lbfgs::{minimize as lbfgs_minimize, LbfgsConfig, LbfgsResult};
pub use quad_ot::{quad_ot_solve, QuadOtSolution};
pub use transport::{transport, TransportSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlignMethod {
    #[default]
    Ot,
    QuadOt,
    LinReg,
    ManyToOne,
}

impl AlignMethod {
    pub const ALL: [AlignMethod; 4] = [
        AlignMethod::Ot,
        AlignMethod::QuadOt,
        AlignMethod::LinReg,
        AlignMethod::ManyToOne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlignMethod::Ot => "ot",
            AlignMethod::QuadOt => "quad-ot",
            AlignMethod::LinReg => "lin-reg",
            AlignMethod::ManyToOne => "many-to-one",
        }
    }
}

impl fmt::Display for AlignMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlignMethod {
    type Err = PascoError;

    fn from_str(s: &str) -> Result<Self> {
        AlignMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| PascoError::InvalidParameter(format!("unknown alignment method `{s}`")))
    }
}

/// Exact OT between the cluster distributions of `p` and `pbar`.
///
/// Returns `Σ C2_ij Q_ij` and the optimal plan.
pub fn ot_distance_and_plan(p: &Partition, pbar: &Partition) -> Result<(f64, CouplingMatrix)> {
    let t = contingency(p, pbar)?;
    let (k, kbar) = (t.rows(), t.cols());
    if k == 0 || kbar == 0 {
        return Err(PascoError::Degenerate("partition with no clusters".into()));
    }
    let cost = ClusterCostMatrix::from_contingency(&t);
    // Scaled by k·k̄ so that all marginals are integers.
    let sol = transport(&vec![kbar as i64; k], &vec![k as i64; kbar], cost.as_slice())?;
    let scale = (k * kbar) as f64;
    let plan = CouplingMatrix::new(k, kbar, sol.flow.iter().map(|&x| x as f64 / scale).collect())?;
    Ok((sol.cost as f64 / scale, plan))
}

/// `Q = diag(|C_i|)⁻¹ · contingency`.
pub fn lin_reg_align(p: &Partition, pbar: &Partition) -> Result<CouplingMatrix> {
    let t = contingency(p, pbar)?;
    let (k, kbar) = (t.rows(), t.cols());
    let mut data = Vec::with_capacity(k * kbar);
    for i in 0..k {
        let size = t.row_sizes()[i];
        if size == 0 {
            return Err(PascoError::EmptyCluster(i));
        }
        data.extend(t.row(i).iter().map(|&c| c as f64 / size as f64));
    }
    CouplingMatrix::new(k, kbar, data)
}

/// Each cluster sent to the reference cluster it overlaps most.
pub fn many_to_one_align(p: &Partition, pbar: &Partition) -> Result<CouplingMatrix> {
    let t = contingency(p, pbar)?;
    let (k, kbar) = (t.rows(), t.cols());
    let mut data = vec![0.0; k * kbar];
    if kbar > 0 {
        for i in 0..k {
            let row = t.row(i);
            let mut best = 0;
            for j in 1..kbar {
                if row[j] > row[best] {
                    best = j;
                }
            }
            data[i * kbar + best] = 1.0;
        }
    }
    CouplingMatrix::new(k, kbar, data)
}

pub fn quad_ot_align(p: &Partition, pbar: &Partition) -> Result<CouplingMatrix> {
    Ok(quad_ot_solve(&contingency(p, pbar)?)?.plan)
}

pub fn align(method: AlignMethod, p: &Partition, pbar: &Partition) -> Result<CouplingMatrix> {
    match method {
        AlignMethod::Ot => Ok(ot_distance_and_plan(p, pbar)?.1),
        AlignMethod::QuadOt => quad_ot_align(p, pbar),
        AlignMethod::LinReg => lin_reg_align(p, pbar),
        AlignMethod::ManyToOne => many_to_one_align(p, pbar),
    }
}

fn check_shapes(partitions: &[Partition], plans: &[CouplingMatrix], kbar: usize) -> Result<usize> {
    let first = partitions.first().ok_or(PascoError::Empty("partition list"))?;
    if plans.len() != partitions.len() {
        return Err(PascoError::SizeMismatch {
            context: "plans per partition",
            expected: partitions.len(),
            found: plans.len(),
        });
    }
    for (p, q) in partitions.iter().zip(plans) {
        if p.len() != first.len() {
            return Err(PascoError::SizeMismatch {
                context: "partition length",
                expected: first.len(),
                found: p.len(),
            });
        }
        if q.rows() != p.k() || q.cols() != kbar {
            return Err(PascoError::SizeMismatch {
                context: "plan shape",
                expected: p.k() * kbar,
                found: q.rows() * q.cols(),
            });
        }
    }
    Ok(first.len())
}

/// Label of item `i` is `argmax_p Σ_r Q_r[l_r(i), p]`, ties to the smallest
/// `p`. Empty reference clusters are dropped by compaction.
pub fn majority_vote_update(
    partitions: &[Partition],
    plans: &[CouplingMatrix],
    kbar: usize,
    exec: &Executor,
) -> Result<Partition> {
    let n = check_shapes(partitions, plans, kbar)?;
    if kbar == 0 {
        return Err(PascoError::Degenerate("reference with no clusters".into()));
    }
    let mut labels = vec![0usize; n];
    exec.for_each_chunk(&mut labels, 4096, |start, out| {
        let mut acc = vec![0.0f64; kbar];
        for (offset, slot) in out.iter_mut().enumerate() {
            let i = start + offset;
            acc.iter_mut().for_each(|a| *a = 0.0);
            for (p, q) in partitions.iter().zip(plans) {
                acc.iter_mut().zip(q.row(p.label(i))).for_each(|(a, x)| *a += x);
            }
            let mut best = 0;
            for j in 1..kbar {
                if acc[j] > acc[best] {
                    best = j;
                }
            }
            *slot = best;
        }
    });
    Ok(Partition::from_labels(labels))
}

/// Heuristic `(k̄, index of the starting reference)`.
pub fn choose_reference(partitions: &[Partition]) -> Result<(usize, usize)> {
    let ks: Vec<usize> = partitions.iter().map(Partition::k).collect();
    let Some(&k1) = ks.first() else {
        return Err(PascoError::Empty("partition list"));
    };
    if ks.iter().all(|&k| k == k1) {
        return Ok((k1, 0));
    }
    let mut sorted = ks.clone();
    sorted.sort_unstable();
    let r = sorted.len();
    // Twice the median, kept integral.
    let median2 = if r % 2 == 1 {
        2 * sorted[r / 2]
    } else {
        sorted[r / 2 - 1] + sorted[r / 2]
    };
    let best = (0..r)
        .min_by_key(|&i| ((2 * ks[i]).abs_diff(median2), ks[i], i))
        .expect("nonempty");
    Ok((ks[best], best))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ReferenceInit {
    /// Partition closest to the median cluster count.
    #[default]
    Heuristic,
    /// Uniformly random labels with `k̄` clusters, drawn from the fusion seed.
    Random,
    Given(Partition),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionConfig {
    pub align_method: AlignMethod,
    pub max_iters: usize,
    pub kbar_override: Option<usize>,
    pub init: ReferenceInit,
    pub seed: u64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            align_method: AlignMethod::Ot,
            max_iters: 100,
            kbar_override: None,
            init: ReferenceInit::Heuristic,
            seed: 0,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(PascoError::InvalidParameter("max_iters must be >= 1".into()));
        }
        if self.kbar_override == Some(0) {
            return Err(PascoError::InvalidParameter("kbar must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionOutcome {
    #[serde(skip)]
    pub partition: Partition,
    pub iterations: usize,
    pub converged: bool,
    pub kbar_initial: usize,
    pub kbar_final: usize,
    /// Replicas that came back as a single cluster.
    pub single_cluster_replicas: Vec<usize>,
}

fn random_partition(n: usize, k: usize, seed: u64) -> Partition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Partition::from_labels((0..n).map(|_| rng.random_range(0..k)).collect())
}

fn initial_reference(partitions: &[Partition], cfg: &FusionConfig) -> Result<Partition> {
    let n = partitions[0].len();
    match (&cfg.init, cfg.kbar_override) {
        (ReferenceInit::Given(p), _) => {
            if p.len() != n {
                return Err(PascoError::SizeMismatch {
                    context: "initial reference",
                    expected: n,
                    found: p.len(),
                });
            }
            Ok(p.clone().compacted())
        }
        (ReferenceInit::Heuristic, None) => {
            let (_, r) = choose_reference(partitions)?;
            Ok(partitions[r].clone())
        }
        (ReferenceInit::Heuristic, Some(kbar)) => {
            match partitions.iter().find(|p| p.k() == kbar) {
                Some(p) => Ok(p.clone()),
                None => Ok(random_partition(n, kbar.min(n), cfg.seed)),
            }
        }
        (ReferenceInit::Random, kbar) => {
            let kbar = match kbar {
                Some(k) => k,
                None => choose_reference(partitions)?.0,
            };
            Ok(random_partition(n, kbar.min(n), cfg.seed))
        }
    }
}

/// Alternates alignment of every partition onto the reference with the
/// majority-vote update until the reference labels stop changing.
pub fn align_and_fuse(
    partitions: &[Partition],
    cfg: &FusionConfig,
    exec: &Executor,
) -> Result<FusionOutcome> {
    cfg.validate()?;
    let first = partitions.first().ok_or(PascoError::Empty("partition list"))?;
    if let Some(p) = partitions.iter().find(|p| p.len() != first.len()) {
        return Err(PascoError::SizeMismatch {
            context: "partition length",
            expected: first.len(),
            found: p.len(),
        });
    }
    if first.is_empty() {
        return Err(PascoError::Empty("partitions"));
    }
    // Canonical names make the result depend on groupings alone: plan vertices
    // and majority-vote ties are otherwise decided by label order.
    let partitions: Vec<Partition> = partitions.iter().map(Partition::canonical).collect();
    let single_cluster_replicas: Vec<usize> =
        (0..partitions.len()).filter(|&r| partitions[r].k() == 1).collect();
    let mut reference = initial_reference(&partitions, cfg)?.canonical();
    let kbar_initial = reference.k();
    for iteration in 1..=cfg.max_iters {
        let plans = exec.map(partitions.len(), |r| {
            align(cfg.align_method, &partitions[r], &reference)
                .map_err(|e| PascoError::replica(r, e))
        });
        let plans = plans.into_iter().collect::<Result<Vec<_>>>()?;
        let next = majority_vote_update(&partitions, &plans, reference.k(), exec)?.canonical();
        let converged = next.labels() == reference.labels();
        reference = next;
        if converged || iteration == cfg.max_iters {
            log::debug!(
                "fusion stopped after {iteration} iterations (converged: {converged}), k̄ = {}",
                reference.k()
            );
            return Ok(FusionOutcome {
                kbar_final: reference.k(),
                partition: reference,
                iterations: iteration,
                converged,
                kbar_initial,
                single_cluster_replicas,
            });
        }
    }
    unreachable!("max_iters >= 1")
}
