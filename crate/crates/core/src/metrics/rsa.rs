//! Restricted spectral approximation of a coarsening.

use crate::error::{PascoError, Result};
use crate::graph::WeightedGraph;
use crate::linalg::symmetric_eigen;
use crate::table::CoarseningTable;

const NULL_EIGENVALUE: f64 = 1e-10;

/// Leading Laplacian eigenpairs of a graph, reusable across coarsenings.
#[derive(Debug, Clone)]
pub struct RsaBasis {
    graph: WeightedGraph,
    k: usize,
    values: Vec<f64>,
    /// Column `j` at `[j * n..(j + 1) * n]`.
    vectors: Vec<f64>,
}

/// `y = L x` with `L = D - A` built from off-diagonal weights only.
fn laplacian_apply(g: &WeightedGraph, x: &[f64], y: &mut [f64]) {
    for u in 0..g.n() {
        let (nbrs, ws) = g.neighbors(u);
        let mut acc = 0.0;
        for (&v, &w) in nbrs.iter().zip(ws) {
            acc += w * (x[u] - x[v]);
        }
        y[u] = acc;
    }
}

impl RsaBasis {
    pub fn new(g: &WeightedGraph, k: usize) -> Result<Self> {
        let n = g.n();
        if n > crate::clustering::MAX_DENSE_NODES {
            return Err(PascoError::TooLarge {
                n,
                limit: crate::clustering::MAX_DENSE_NODES,
            });
        }
        if k == 0 || k > n {
            return Err(PascoError::InvalidParameter(format!("rsa needs 1 <= k <= {n}, got {k}")));
        }
        let mut l = vec![0.0; n * n];
        for u in 0..n {
            let (nbrs, ws) = g.neighbors(u);
            l[u * n + u] = ws.iter().sum();
            for (&v, &w) in nbrs.iter().zip(ws) {
                l[u * n + v] = -w;
            }
        }
        let (mut values, mut vectors) = symmetric_eigen(n, &l)?;
        values.truncate(k);
        vectors.truncate(k * n);
        let nulls = values.iter().filter(|&&v| v <= NULL_EIGENVALUE).count();
        if nulls > 1 {
            log::warn!("rsa: {nulls} near-zero Laplacian eigenvalues among the first {k}; null directions excluded");
        }
        Ok(RsaBasis {
            graph: g.clone(),
            k,
            values,
            vectors,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn eigenvector(&self, j: usize) -> &[f64] {
        let n = self.graph.n();
        &self.vectors[j * n..(j + 1) * n]
    }

    /// Smallest `ε` with `‖x - Πx‖_L ≤ ε ‖x‖_L` on the retained span.
    pub fn rsa(&self, h: &CoarseningTable) -> Result<f64> {
        let n = self.graph.n();
        if h.n_src() != n {
            return Err(PascoError::SizeMismatch {
                context: "rsa table",
                expected: n,
                found: h.n_src(),
            });
        }
        let keep: Vec<usize> = (0..self.k).filter(|&j| self.values[j] > NULL_EIGENVALUE).collect();
        let r = keep.len();
        if r == 0 {
            return Ok(0.0);
        }
        let sizes = h.sizes();
        let mut b = vec![0.0; r * n];
        let mut lb = vec![0.0; r * n];
        let mut means = vec![0.0; h.n_dst()];
        for (c, &j) in keep.iter().enumerate() {
            let u = self.eigenvector(j);
            means.iter_mut().for_each(|m| *m = 0.0);
            for i in 0..n {
                means[h.get(i)] += u[i];
            }
            for (m, &s) in means.iter_mut().zip(&sizes) {
                *m /= s as f64;
            }
            let col = &mut b[c * n..(c + 1) * n];
            for i in 0..n {
                col[i] = u[i] - means[h.get(i)];
            }
            laplacian_apply(&self.graph, &b[c * n..(c + 1) * n], &mut lb[c * n..(c + 1) * n]);
        }
        let scale: Vec<f64> = keep.iter().map(|&j| 1.0 / self.values[j].sqrt()).collect();
        let mut m = vec![0.0; r * r];
        for p in 0..r {
            for q in p..r {
                let dot: f64 = b[p * n..(p + 1) * n]
                    .iter()
                    .zip(&lb[q * n..(q + 1) * n])
                    .map(|(x, y)| x * y)
                    .sum();
                let v = dot * scale[p] * scale[q];
                m[p * r + q] = v;
                m[q * r + p] = v;
            }
        }
        let (vals, _) = symmetric_eigen(r, &m)?;
        Ok(vals.last().copied().unwrap_or(0.0).max(0.0).sqrt())
    }
}

pub fn rsa(g: &WeightedGraph, h: &CoarseningTable, k: usize) -> Result<f64> {
    RsaBasis::new(g, k)?.rsa(h)
}
