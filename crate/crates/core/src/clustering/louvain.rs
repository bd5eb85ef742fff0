//! Greedy modularity maximization with local moves and aggregation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PascoError, Result};
use crate::graph::WeightedGraph;
use crate::partition::Partition;
use crate::table::CoarseningTable;

const MAX_PASSES: usize = 1000;
const GAIN_EPS: f64 = 1e-12;

/// One local-move phase. Returns the community of each node and whether any
/// node moved.
fn local_moves<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> (Vec<usize>, bool) {
    let n = g.n();
    let two_m = g.total_weight();
    let deg = g.degrees();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot: Vec<f64> = deg.to_vec();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }

    let mut link = vec![0.0f64; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;
    for _ in 0..MAX_PASSES {
        let mut moved = false;
        for &u in &order {
            let (nbrs, ws) = g.neighbors(u);
            let cur = comm[u];
            for (&v, &w) in nbrs.iter().zip(ws) {
                let c = comm[v];
                if link[c] == 0.0 {
                    touched.push(c);
                }
                link[c] += w;
            }
            let du = deg[u];
            tot[cur] -= du;
            let ratio = du / two_m;
            let mut best = cur;
            let mut best_gain = link[cur] - tot[cur] * ratio;
            for &c in &touched {
                let gain = link[c] - tot[c] * ratio;
                if gain > best_gain + GAIN_EPS {
                    best = c;
                    best_gain = gain;
                }
            }
            tot[best] += du;
            if best != cur {
                comm[u] = best;
                moved = true;
            }
            for &c in &touched {
                link[c] = 0.0;
            }
            link[cur] = 0.0;
            touched.clear();
        }
        if !moved {
            break;
        }
        moved_any = true;
    }
    (comm, moved_any)
}

/// Louvain-style modularity optimization; node order shuffled by `seed`.
/// Clusters are numbered by first appearance.
pub fn greedy_modularity(g: &WeightedGraph, seed: u64) -> Result<Partition> {
    if g.n() == 0 {
        return Err(PascoError::Empty("graph"));
    }
    if g.total_weight() <= 0.0 {
        return Err(PascoError::ZeroWeight);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<usize> = (0..g.n()).collect();
    let mut current = g.clone();
    loop {
        let (comm, moved) = local_moves(&current, &mut rng);
        if !moved {
            break;
        }
        let table = CoarseningTable::relabel_consecutive(&comm)?;
        for l in labels.iter_mut() {
            *l = table.get(*l);
        }
        if table.n_dst() == current.n() {
            break;
        }
        current = current.coarsen(&table)?;
    }
    Ok(Partition::from_labels(labels).canonical())
}
