//! Hard partitions stored as label arrays, and contingency tables between them.

use crate::error::{PascoError, Result};

/// Assignment of `N` items to `k` clusters (labels `0..k`).
///
/// Built with [`Partition::from_labels`] a partition is compact: every label
/// in `0..k` is used. [`Partition::with_k`] keeps empty clusters, which the
/// fusion step needs while its reference is being updated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Compacts arbitrary labels by rank: label values keep their relative
    /// order, gaps are closed. Already compact labels are left untouched.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let Some(&max) = labels.iter().max() else {
            return Partition { labels, k: 0 };
        };
        let mut used = vec![false; max + 1];
        for &l in &labels {
            used[l] = true;
        }
        if used.iter().all(|&u| u) {
            return Partition { labels, k: max + 1 };
        }
        let mut rank = vec![usize::MAX; max + 1];
        let mut k = 0;
        for (l, &u) in used.iter().enumerate() {
            if u {
                rank[l] = k;
                k += 1;
            }
        }
        let labels = labels.into_iter().map(|l| rank[l]).collect();
        Partition { labels, k }
    }

    /// Keeps `k` clusters even if some are empty.
    pub fn with_k(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(PascoError::NodeOutOfRange { index: bad, n: k });
        }
        Ok(Partition { labels, k })
    }

    pub fn single_cluster(n: usize) -> Self {
        Partition {
            labels: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            labels: (0..n).collect(),
            k: n,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn first_empty_cluster(&self) -> Option<usize> {
        self.sizes().iter().position(|&s| s == 0)
    }

    pub fn compacted(self) -> Self {
        Partition::from_labels(self.labels)
    }

    /// Relabels clusters by order of first appearance.
    pub fn canonical(&self) -> Self {
        let (labels, k) = crate::table::first_appearance(&self.labels);
        Partition { labels, k }
    }

    /// Same grouping of items, irrespective of cluster names.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.len() == other.len() && self.canonical().labels == other.canonical().labels
    }
}

/// `counts[i * cols + j] = |C_i ∩ C'_j|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    counts: Vec<usize>,
    row_sizes: Vec<usize>,
    col_sizes: Vec<usize>,
    n: usize,
}

impl ContingencyTable {
    pub fn new(p: &Partition, q: &Partition) -> Result<Self> {
        if p.len() != q.len() {
            return Err(PascoError::SizeMismatch {
                context: "contingency",
                expected: p.len(),
                found: q.len(),
            });
        }
        let (rows, cols) = (p.k(), q.k());
        let mut counts = vec![0usize; rows * cols];
        let mut row_sizes = vec![0usize; rows];
        let mut col_sizes = vec![0usize; cols];
        for (&a, &b) in p.labels().iter().zip(q.labels()) {
            counts[a * cols + b] += 1;
            row_sizes[a] += 1;
            col_sizes[b] += 1;
        }
        Ok(ContingencyTable {
            rows,
            cols,
            counts,
            row_sizes,
            col_sizes,
            n: p.len(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.counts[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.counts[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_sizes(&self) -> &[usize] {
        &self.row_sizes
    }

    pub fn col_sizes(&self) -> &[usize] {
        &self.col_sizes
    }

    pub fn total(&self) -> usize {
        self.n
    }
}

pub fn contingency(p: &Partition, q: &Partition) -> Result<ContingencyTable> {
    ContingencyTable::new(p, q)
}
