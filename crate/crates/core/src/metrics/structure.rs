//! Graph-structural scores of a partition.

use std::collections::BTreeMap;

use crate::error::{PascoError, Result};
use crate::graph::WeightedGraph;
use crate::partition::Partition;

fn check(g: &WeightedGraph, p: &Partition) -> Result<()> {
    if g.n() != p.len() {
        return Err(PascoError::SizeMismatch {
            context: "partition vs graph",
            expected: g.n(),
            found: p.len(),
        });
    }
    Ok(())
}

/// Per-cluster volume and internal weight (`Σ_{u,v ∈ C} A_uv`).
fn volumes(g: &WeightedGraph, p: &Partition) -> (Vec<f64>, Vec<f64>) {
    let mut vol = vec![0.0; p.k()];
    let mut internal = vec![0.0; p.k()];
    for u in 0..g.n() {
        let c = p.label(u);
        vol[c] += g.degree(u);
        internal[c] += g.self_loop(u);
        let (nbrs, ws) = g.neighbors(u);
        for (&v, &w) in nbrs.iter().zip(ws) {
            if p.label(v) == c {
                internal[c] += w;
            }
        }
    }
    (vol, internal)
}

pub fn modularity(g: &WeightedGraph, p: &Partition) -> Result<f64> {
    check(g, p)?;
    let two_m = g.total_weight();
    if two_m <= 0.0 {
        return Err(PascoError::ZeroWeight);
    }
    let (vol, internal) = volumes(g, p);
    Ok(vol
        .iter()
        .zip(&internal)
        .map(|(v, i)| i - v * v / two_m)
        .sum::<f64>()
        / two_m)
}

/// Mean over clusters of cut weight divided by volume.
pub fn gncut(g: &WeightedGraph, p: &Partition) -> Result<f64> {
    check(g, p)?;
    if p.k() == 0 {
        return Err(PascoError::Empty("partition"));
    }
    let (vol, internal) = volumes(g, p);
    let mut total = 0.0;
    for (j, (v, i)) in vol.iter().zip(&internal).enumerate() {
        if *v <= 0.0 {
            return Err(PascoError::ZeroVolume(j));
        }
        total += (v - i) / v;
    }
    Ok(total / p.k() as f64)
}

fn h(x: f64) -> f64 {
    let xlx = if x > 0.0 { x * x.ln() } else { 0.0 };
    (1.0 + x) * (1.0 + x).ln() - xlx
}

/// Block-model description length in nats.
///
/// `e_ij` is the edge weight between blocks `i ≠ j` and `e_ii` is twice the
/// internal weight, so that `Σ_ij e_ij = 2|E|`.
pub fn description_length(g: &WeightedGraph, p: &Partition) -> Result<f64> {
    check(g, p)?;
    let edges = g.total_weight() / 2.0;
    if edges <= 0.0 {
        return Err(PascoError::Empty("edge set"));
    }
    let mut e: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for u in 0..g.n() {
        let cu = p.label(u);
        if g.self_loop(u) > 0.0 {
            *e.entry((cu, cu)).or_insert(0.0) += g.self_loop(u);
        }
        let (nbrs, ws) = g.neighbors(u);
        for (&v, &w) in nbrs.iter().zip(ws) {
            *e.entry((cu, p.label(v))).or_insert(0.0) += w;
        }
    }
    let sizes = p.sizes();
    let mut s = edges;
    for (&(i, j), &eij) in &e {
        if eij > 0.0 {
            s -= 0.5 * eij * (eij / (sizes[i] as f64 * sizes[j] as f64)).ln();
        }
    }
    let k = p.k() as f64;
    let l = edges * h(k * (k + 1.0) / (2.0 * edges)) + g.n() as f64 * k.ln();
    Ok(s + l)
}
