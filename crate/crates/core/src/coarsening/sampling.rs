//! Edge-sampling rules for one level of contraction.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::PascoError;
use crate::graph::WeightedGraph;

/// How contraction edges are drawn within a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingRule {
    /// `u` uniform among unvisited nodes, `v` a uniform neighbor of `u`.
    #[default]
    UniformNodeUnvisited,
    /// Uniform over all non-loop edges (no marking).
    UniformEdge,
    /// Uniform over edges whose endpoints are both still unmarked.
    UniformEdgeMarkedEdges,
    /// `u` proportional to its neighbor count among unvisited nodes.
    DegreeNodeMarkedNodes,
    /// Greedy matching by descending edge weight.
    HeavyEdgeBaseline,
}

impl SamplingRule {
    pub const ALL: [SamplingRule; 5] = [
        SamplingRule::UniformNodeUnvisited,
        SamplingRule::UniformEdge,
        SamplingRule::UniformEdgeMarkedEdges,
        SamplingRule::DegreeNodeMarkedNodes,
        SamplingRule::HeavyEdgeBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SamplingRule::UniformNodeUnvisited => "uniform-node-unvisited",
            SamplingRule::UniformEdge => "uniform-edge",
            SamplingRule::UniformEdgeMarkedEdges => "uniform-edge-marked-edges",
            SamplingRule::DegreeNodeMarkedNodes => "degree-node-marked-nodes",
            SamplingRule::HeavyEdgeBaseline => "heavy-edge-baseline",
        }
    }
}

impl fmt::Display for SamplingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplingRule {
    type Err = PascoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SamplingRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| PascoError::InvalidParameter(format!("unknown sampling rule `{s}`")))
    }
}

/// Swap-remove set supporting O(1) uniform draws.
#[derive(Debug)]
struct AvailableSet {
    items: Vec<usize>,
    pos: Vec<usize>,
}

impl AvailableSet {
    fn full(n: usize) -> Self {
        AvailableSet {
            items: (0..n).collect(),
            pos: (0..n).collect(),
        }
    }

    fn remove(&mut self, u: usize) {
        let p = self.pos[u];
        if p == usize::MAX {
            return;
        }
        let last = *self.items.last().unwrap();
        self.items.swap_remove(p);
        if last != u {
            self.pos[last] = p;
        }
        self.pos[u] = usize::MAX;
    }
}

/// Fenwick tree over integer weights, used for degree-proportional draws.
#[derive(Debug)]
struct Fenwick {
    tree: Vec<u64>,
    values: Vec<u64>,
    total: u64,
}

impl Fenwick {
    fn new(values: Vec<u64>) -> Self {
        let n = values.len();
        let mut tree = vec![0u64; n + 1];
        for (i, &v) in values.iter().enumerate() {
            tree[i + 1] += v;
            let parent = (i + 1) + ((i + 1) & (i + 1).wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i + 1];
            }
        }
        let total = values.iter().sum();
        Fenwick { tree, values, total }
    }

    fn clear(&mut self, i: usize) {
        let v = self.values[i];
        if v == 0 {
            return;
        }
        self.values[i] = 0;
        self.total -= v;
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] -= v;
            j += j & j.wrapping_neg();
        }
    }

    /// Smallest index whose prefix sum exceeds `target` (< total).
    fn find(&self, mut target: u64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0usize;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

#[derive(Debug)]
enum SamplerKind {
    Unvisited(AvailableSet),
    Degree(Fenwick),
    EdgeOrder {
        edges: Vec<(usize, usize)>,
        cursor: usize,
        marked: Option<Vec<bool>>,
    },
}

/// Sampler state for one contraction level.
///
/// Each call to [`EdgeSampler::next_edge`] returns the next pair to contract
/// under the selected rule and updates the visited/marked bookkeeping, or
/// `None` once no admissible edge remains.
#[derive(Debug)]
pub struct EdgeSampler<'g> {
    graph: &'g WeightedGraph,
    rule: SamplingRule,
    kind: SamplerKind,
}

impl<'g> EdgeSampler<'g> {
    pub fn new<R: Rng + ?Sized>(graph: &'g WeightedGraph, rule: SamplingRule, rng: &mut R) -> Self {
        let n = graph.n();
        let kind = match rule {
            SamplingRule::UniformNodeUnvisited => SamplerKind::Unvisited(AvailableSet::full(n)),
            SamplingRule::DegreeNodeMarkedNodes => SamplerKind::Degree(Fenwick::new(
                (0..n).map(|u| graph.neighbor_count(u) as u64).collect(),
            )),
            SamplingRule::UniformEdge | SamplingRule::UniformEdgeMarkedEdges => {
                let mut edges: Vec<(usize, usize)> = graph.edges().map(|(u, v, _)| (u, v)).collect();
                shuffle(&mut edges, rng);
                let marked = (rule == SamplingRule::UniformEdgeMarkedEdges).then(|| vec![false; n]);
                SamplerKind::EdgeOrder {
                    edges,
                    cursor: 0,
                    marked,
                }
            }
            SamplingRule::HeavyEdgeBaseline => {
                let mut edges: Vec<(usize, usize, f64)> = graph.edges().collect();
                // Shuffle first so equal weights are matched in random order.
                shuffle(&mut edges, rng);
                edges.sort_by(|a, b| b.2.total_cmp(&a.2));
                SamplerKind::EdgeOrder {
                    edges: edges.into_iter().map(|(u, v, _)| (u, v)).collect(),
                    cursor: 0,
                    marked: Some(vec![false; n]),
                }
            }
        };
        EdgeSampler { graph, rule, kind }
    }

    pub fn rule(&self) -> SamplingRule {
        self.rule
    }

    pub fn next_edge<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<(usize, usize)> {
        let graph = self.graph;
        match &mut self.kind {
            SamplerKind::Unvisited(available) => loop {
                if available.items.is_empty() {
                    return None;
                }
                let u = available.items[rng.random_range(0..available.items.len())];
                available.remove(u);
                let nbrs = graph.neighbors(u).0;
                if nbrs.is_empty() {
                    // Isolated: stays its own hypernode.
                    continue;
                }
                let v = nbrs[rng.random_range(0..nbrs.len())];
                available.remove(v);
                return Some((u, v));
            },
            SamplerKind::Degree(weights) => {
                if weights.total == 0 {
                    return None;
                }
                let u = weights.find(rng.random_range(0..weights.total));
                weights.clear(u);
                let nbrs = graph.neighbors(u).0;
                let v = nbrs[rng.random_range(0..nbrs.len())];
                weights.clear(v);
                Some((u, v))
            }
            SamplerKind::EdgeOrder {
                edges,
                cursor,
                marked,
            } => {
                while *cursor < edges.len() {
                    let (u, v) = edges[*cursor];
                    *cursor += 1;
                    if let Some(marked) = marked {
                        if marked[u] || marked[v] {
                            continue;
                        }
                        marked[u] = true;
                        marked[v] = true;
                    }
                    return Some((u, v));
                }
                None
            }
        }
    }
}

fn shuffle<T, R: Rng + ?Sized>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}
