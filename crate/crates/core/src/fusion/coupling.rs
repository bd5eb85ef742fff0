use serde::{Deserialize, Serialize};

use crate::error::{PascoError, Result};
use crate::partition::ContingencyTable;

/// Nonnegative `rows × cols` matrix aligning the clusters of one partition
/// (rows) to those of a reference (columns). Row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CouplingMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(PascoError::SizeMismatch {
                context: "coupling matrix",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(&bad) = data.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(PascoError::InvalidWeight(bad));
        }
        Ok(CouplingMatrix { rows, cols, data })
    }

    pub fn identity(k: usize) -> Self {
        let mut data = vec![0.0; k * k];
        (0..k).for_each(|i| data[i * k + i] = 1.0);
        CouplingMatrix { rows: k, cols: k, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.data.chunks_exact(self.cols.max(1)).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for r in self.data.chunks_exact(self.cols.max(1)) {
            sums.iter_mut().zip(r).for_each(|(s, x)| *s += x);
        }
        sums
    }

    /// Largest deviation from the uniform `1/rows`, `1/cols` marginals.
    pub fn marginal_error(&self) -> f64 {
        let (a, b) = (1.0 / self.rows as f64, 1.0 / self.cols as f64);
        let r = self.row_sums().iter().fold(0.0f64, |m, s| m.max((s - a).abs()));
        self.col_sums().iter().fold(r, |m, s| m.max((s - b).abs()))
    }

    /// `Σ cost_ij Q_ij`.
    pub fn inner(&self, cost: &[f64]) -> f64 {
        self.data.iter().zip(cost).map(|(q, c)| q * c).sum()
    }
}

/// Squared distances between cluster indicator vectors:
/// `C2_ij = |C_i| + |C̄_j| - 2 |C_i ∩ C̄_j|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterCostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl ClusterCostMatrix {
    pub fn from_contingency(t: &ContingencyTable) -> Self {
        let (rows, cols) = (t.rows(), t.cols());
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let a = t.row_sizes()[i] as i64;
            for j in 0..cols {
                data.push(a + t.col_sizes()[j] as i64 - 2 * t.get(i, j) as i64);
            }
        }
        ClusterCostMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.data
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&x| x as f64).collect()
    }
}
