//! Sparse undirected weighted graphs with self-loops.
//!
//! Off-diagonal entries live in a CSR structure with sorted neighbor lists.
//! The diagonal is stored separately and holds `A_uu`, which is **twice** the
//! internal weight of node `u`. With that convention the degree of a node is
//! the plain row sum of `A` and the total weight `1ᵀA1 = 2m` is preserved by
//! coarsening.

use crate::error::{PascoError, Result};
use crate::table::CoarseningTable;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    diag: Vec<f64>,
    degrees: Vec<f64>,
    total: f64,
}

impl WeightedGraph {
    /// Builds a graph on `n` nodes from 0-based `(u, v, w)` triples.
    ///
    /// Duplicate pairs accumulate; a self-loop `(u, u, w)` contributes `2w`
    /// to `A_uu`. Zero weights are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut triples = Vec::with_capacity(2 * edges.len());
        let mut diag = vec![0.0; n];
        for &(u, v, w) in edges {
            for index in [u, v] {
                if index >= n {
                    return Err(PascoError::NodeOutOfRange { index, n });
                }
            }
            if !w.is_finite() || w < 0.0 {
                return Err(PascoError::InvalidWeight(w));
            }
            if w == 0.0 {
                continue;
            }
            if u == v {
                diag[u] += 2.0 * w;
            } else {
                triples.push((u, v, w));
                triples.push((v, u, w));
            }
        }
        triples.sort_unstable_by_key(|t| (t.0, t.1));

        let mut offsets = vec![0usize; n + 1];
        let mut targets: Vec<usize> = Vec::with_capacity(triples.len());
        let mut weights: Vec<f64> = Vec::with_capacity(triples.len());
        let mut row = 0usize;
        for (u, v, w) in triples {
            while row < u {
                row += 1;
                offsets[row] = targets.len();
            }
            if targets.len() > offsets[row] && *targets.last().unwrap() == v {
                *weights.last_mut().unwrap() += w;
            } else {
                targets.push(v);
                weights.push(w);
            }
        }
        while row < n {
            row += 1;
            offsets[row] = targets.len();
        }
        Ok(Self::from_parts(offsets, targets, weights, diag))
    }

    /// Assembles a graph from CSR parts; rows must be sorted and symmetric.
    fn from_parts(
        offsets: Vec<usize>,
        targets: Vec<usize>,
        weights: Vec<f64>,
        diag: Vec<f64>,
    ) -> Self {
        let n = diag.len();
        let degrees: Vec<f64> = (0..n)
            .map(|u| diag[u] + weights[offsets[u]..offsets[u + 1]].iter().sum::<f64>())
            .collect();
        let total = degrees.iter().sum();
        WeightedGraph {
            offsets,
            targets,
            weights,
            diag,
            degrees,
            total,
        }
    }

    /// A graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self::from_parts(vec![0; n + 1], Vec::new(), Vec::new(), vec![0.0; n])
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Non-loop neighbors of `u` (sorted) and the matching weights.
    pub fn neighbors(&self, u: usize) -> (&[usize], &[f64]) {
        let range = self.offsets[u]..self.offsets[u + 1];
        (&self.targets[range.clone()], &self.weights[range])
    }

    pub fn neighbor_count(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Diagonal entry `A_uu` (twice the internal weight).
    pub fn self_loop(&self, u: usize) -> f64 {
        self.diag[u]
    }

    /// Row sum of `A`, self-loop included.
    pub fn degree(&self, u: usize) -> f64 {
        self.degrees[u]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// `1ᵀA1`, i.e. twice the total edge weight.
    pub fn total_weight(&self) -> f64 {
        self.total
    }

    /// Number of distinct non-loop edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Entry `A_uv`.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        if u == v {
            return self.diag[u];
        }
        let (nbrs, ws) = self.neighbors(u);
        match nbrs.binary_search(&v) {
            Ok(pos) => ws[pos],
            Err(_) => 0.0,
        }
    }

    /// Non-loop edges with `u < v`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n()).flat_map(move |u| {
            let (nbrs, ws) = self.neighbors(u);
            nbrs.iter()
                .zip(ws)
                .filter(move |(&v, _)| u < v)
                .map(move |(&v, &w)| (u, v, w))
        })
    }

    /// Connected-component label of every node (labels by first appearance).
    pub fn components(&self) -> (usize, Vec<usize>) {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut stack = Vec::new();
        let mut count = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &v in self.neighbors(u).0 {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.components().0 == 1
    }

    /// Computes `HᵀAH` for the coarsening table `h`.
    ///
    /// Runs in `O(nnz)` with a sparse accumulator; output rows stay sorted.
    pub fn coarsen(&self, h: &CoarseningTable) -> Result<WeightedGraph> {
        if h.n_src() != self.n() {
            return Err(PascoError::SizeMismatch {
                context: "coarsen_adjacency",
                expected: self.n(),
                found: h.n_src(),
            });
        }
        let n_dst = h.n_dst();
        let (starts, members) = h.members();

        let mut offsets = Vec::with_capacity(n_dst + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(self.targets.len());
        let mut weights = Vec::with_capacity(self.targets.len());
        let mut diag = vec![0.0; n_dst];

        let mut marker = vec![usize::MAX; n_dst];
        let mut acc = vec![0.0; n_dst];
        let mut touched: Vec<usize> = Vec::new();
        let map = h.as_slice();

        for a in 0..n_dst {
            touched.clear();
            for &u in &members[starts[a]..starts[a + 1]] {
                diag[a] += self.diag[u];
                let (nbrs, ws) = self.neighbors(u);
                for (&v, &w) in nbrs.iter().zip(ws) {
                    let b = map[v];
                    if b == a {
                        diag[a] += w;
                    } else {
                        if marker[b] != a {
                            marker[b] = a;
                            acc[b] = 0.0;
                            touched.push(b);
                        }
                        acc[b] += w;
                    }
                }
            }
            touched.sort_unstable();
            for &b in &touched {
                targets.push(b);
                weights.push(acc[b]);
            }
            offsets.push(targets.len());
        }
        Ok(Self::from_parts(offsets, targets, weights, diag))
    }

    /// Dense row-major copy of `A`; meant for small instances.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut dense = vec![0.0; n * n];
        for u in 0..n {
            dense[u * n + u] = self.diag[u];
            let (nbrs, ws) = self.neighbors(u);
            for (&v, &w) in nbrs.iter().zip(ws) {
                dense[u * n + v] = w;
            }
        }
        dense
    }
}
