//! Spectral clustering on a dense Laplacian.

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::kmeans::{kmeans, KMeansConfig};
use super::LaplacianKind;
use crate::error::{PascoError, Result};
use crate::graph::WeightedGraph;
use crate::linalg::symmetric_eigen;
use crate::partition::Partition;

pub const MAX_DENSE_NODES: usize = 10_000;

fn laplacian(g: &WeightedGraph, kind: LaplacianKind) -> Vec<f64> {
    let n = g.n();
    let mut l = vec![0.0f64; n * n];
    match kind {
        LaplacianKind::SymmetricNormalized => {
            let inv_sqrt: Vec<f64> = g
                .degrees()
                .iter()
                .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
                .collect();
            for u in 0..n {
                l[u * n + u] = 1.0 - g.self_loop(u) * inv_sqrt[u] * inv_sqrt[u];
                let (nbrs, ws) = g.neighbors(u);
                for (&v, &w) in nbrs.iter().zip(ws) {
                    l[u * n + v] = -w * inv_sqrt[u] * inv_sqrt[v];
                }
            }
        }
        LaplacianKind::Combinatorial => {
            for u in 0..n {
                let (nbrs, ws) = g.neighbors(u);
                l[u * n + u] = ws.iter().sum();
                for (&v, &w) in nbrs.iter().zip(ws) {
                    l[u * n + v] = -w;
                }
            }
        }
    }
    l
}

/// Row-normalized embedding on the `k` eigenvectors with smallest eigenvalues.
pub fn spectral_embedding(g: &WeightedGraph, k: usize, kind: LaplacianKind) -> Result<Vec<f64>> {
    let n = g.n();
    if n > MAX_DENSE_NODES {
        return Err(PascoError::TooLarge {
            n,
            limit: MAX_DENSE_NODES,
        });
    }
    let (_, vectors) = symmetric_eigen(n, &laplacian(g, kind))?;
    let mut emb = vec![0.0f64; n * k];
    for j in 0..k {
        for i in 0..n {
            emb[i * k + j] = vectors[j * n + i];
        }
    }
    for row in emb.chunks_exact_mut(k) {
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|x| *x /= norm);
        }
    }
    Ok(emb)
}

/// k-means on the embedding; clusters are numbered by first appearance.
pub fn spectral(g: &WeightedGraph, k: usize, seed: u64, kind: LaplacianKind) -> Result<Partition> {
    let n = g.n();
    if n == 0 {
        return Err(PascoError::Empty("graph"));
    }
    if k == 0 || k > n {
        return Err(PascoError::InvalidParameter(format!(
            "spectral clustering needs 1 <= k <= n = {n}, got {k}"
        )));
    }
    if k == n {
        return Ok(Partition::singletons(n));
    }
    if k == 1 {
        return Ok(Partition::single_cluster(n));
    }
    let emb = spectral_embedding(g, k, kind)?;
    let distinct: HashSet<Vec<u64>> = emb
        .chunks_exact(k)
        .map(|r| r.iter().map(|x| x.to_bits()).collect())
        .collect();
    if distinct.len() < k {
        return Err(PascoError::Degenerate(format!(
            "embedding has {} distinct rows, fewer than k = {k}",
            distinct.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fit = kmeans(&emb, k, k, &KMeansConfig::default(), &mut rng)?;
    let p = Partition::from_labels(fit.labels).canonical();
    if p.k() != k {
        return Err(PascoError::Degenerate(format!("k-means produced {} of {k} clusters", p.k())));
    }
    Ok(p)
}
