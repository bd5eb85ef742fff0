//! Coarsening tables: node → hypernode maps, their composition and lifting.

use crate::error::{PascoError, Result};
use crate::partition::Partition;

/// Map `h` from the `n_src` nodes of a graph onto the `n_dst` hypernodes of
/// its coarsened version. Always surjective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseningTable {
    map: Vec<usize>,
    n_dst: usize,
}

impl CoarseningTable {
    /// Validates a 0-based map; every hypernode in `0..n_dst` must be hit.
    pub fn new(map: Vec<usize>, n_dst: usize) -> Result<Self> {
        let mut hit = vec![false; n_dst];
        for &a in &map {
            if a >= n_dst {
                return Err(PascoError::NodeOutOfRange { index: a, n: n_dst });
            }
            hit[a] = true;
        }
        if let Some(missing) = hit.iter().position(|&x| !x) {
            return Err(PascoError::InvalidParameter(format!(
                "coarsening table is not surjective: hypernode {missing} is empty"
            )));
        }
        Ok(CoarseningTable { map, n_dst })
    }

    pub fn identity(n: usize) -> Self {
        CoarseningTable {
            map: (0..n).collect(),
            n_dst: n,
        }
    }

    /// Remaps arbitrary labels to `0..n_dst` by order of first appearance.
    pub fn relabel_consecutive(raw: &[usize]) -> Result<Self> {
        if raw.is_empty() {
            return Err(PascoError::Empty("coarsening table labels"));
        }
        let (map, n_dst) = first_appearance(raw);
        Ok(CoarseningTable { map, n_dst })
    }

    pub fn n_src(&self) -> usize {
        self.map.len()
    }

    pub fn n_dst(&self) -> usize {
        self.n_dst
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn get(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn is_identity(&self) -> bool {
        self.n_dst == self.map.len() && self.map.iter().enumerate().all(|(i, &a)| i == a)
    }

    /// `result[i] = inner[self[i]]`: first apply `self`, then `inner`.
    pub fn compose(&self, inner: &CoarseningTable) -> Result<CoarseningTable> {
        if self.n_dst != inner.n_src() {
            return Err(PascoError::SizeMismatch {
                context: "compose_tables",
                expected: self.n_dst,
                found: inner.n_src(),
            });
        }
        Ok(CoarseningTable {
            map: self.map.iter().map(|&a| inner.map[a]).collect(),
            n_dst: inner.n_dst,
        })
    }

    /// Hypernode sizes.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_dst];
        for &a in &self.map {
            sizes[a] += 1;
        }
        sizes
    }

    /// Bucketed members: `members[starts[a]..starts[a+1]]` are the nodes of
    /// hypernode `a`, in increasing order.
    pub fn members(&self) -> (Vec<usize>, Vec<usize>) {
        let mut starts = vec![0usize; self.n_dst + 1];
        for &a in &self.map {
            starts[a + 1] += 1;
        }
        for a in 0..self.n_dst {
            starts[a + 1] += starts[a];
        }
        let mut fill = starts.clone();
        let mut members = vec![0usize; self.map.len()];
        for (i, &a) in self.map.iter().enumerate() {
            members[fill[a]] = i;
            fill[a] += 1;
        }
        (starts, members)
    }

    /// Lifts a partition of hypernodes to the source nodes (`P' = HP`).
    pub fn lift(&self, p: &Partition) -> Result<Partition> {
        if p.len() != self.n_dst {
            return Err(PascoError::SizeMismatch {
                context: "lift_partition",
                expected: self.n_dst,
                found: p.len(),
            });
        }
        let labels = self.map.iter().map(|&a| p.label(a)).collect();
        Ok(Partition::from_labels(labels))
    }
}

/// Sequence of per-level tables and their composition from the original graph
/// to the coarsest one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseningChain {
    levels: Vec<CoarseningTable>,
    composed: CoarseningTable,
}

impl CoarseningChain {
    pub fn new(n: usize) -> Self {
        CoarseningChain {
            levels: Vec::new(),
            composed: CoarseningTable::identity(n),
        }
    }

    pub fn push(&mut self, table: CoarseningTable) -> Result<()> {
        self.composed = self.composed.compose(&table)?;
        self.levels.push(table);
        Ok(())
    }

    pub fn levels(&self) -> &[CoarseningTable] {
        &self.levels
    }

    pub fn composed(&self) -> &CoarseningTable {
        &self.composed
    }
}

pub(crate) fn first_appearance(raw: &[usize]) -> (Vec<usize>, usize) {
    let mut seen = std::collections::HashMap::with_capacity(raw.len().min(1 << 16));
    let map = raw
        .iter()
        .map(|&x| {
            let next = seen.len();
            *seen.entry(x).or_insert(next)
        })
        .collect();
    (map, seen.len())
}

/// Each source node inherits the cluster of its hypernode.
pub fn lift_partition(p: &Partition, h: &CoarseningTable) -> Result<Partition> {
    h.lift(p)
}

pub fn compose_tables(outer: &CoarseningTable, inner: &CoarseningTable) -> Result<CoarseningTable> {
    outer.compose(inner)
}
