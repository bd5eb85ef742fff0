//! Text formats: edge lists, partitions, and the GMM point CSV.
//!
//! Edge list: one `u v [w]` per line, whitespace separated, weight 1 by
//! default, `#` starts a comment. A line holding a single id declares a node
//! without edges. Node ids are arbitrary tokens and are kept for output.
//!
//! Partition: one `node cluster` per line.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{PascoError, Result};
use crate::generators::GmmToyData;
use crate::graph::WeightedGraph;
use crate::partition::Partition;

/// External node identifiers in index order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodeIds {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl NodeIds {
    /// Ids `0..n`.
    pub fn sequential(n: usize) -> Self {
        let mut ids = NodeIds::default();
        (0..n).for_each(|i| {
            ids.intern(&i.to_string());
        });
        ids
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

pub fn parse_edge_list(text: &str) -> Result<(WeightedGraph, NodeIds)> {
    let mut ids = NodeIds::default();
    let mut edges = Vec::new();
    for (line, tokens) in content_lines(text) {
        match tokens.as_slice() {
            [u] => {
                ids.intern(u);
            }
            [u, v, rest @ ..] => {
                let w = match rest {
                    [] => 1.0,
                    [w] => w.parse::<f64>().map_err(|e| PascoError::Parse {
                        line,
                        msg: format!("bad weight `{w}`: {e}"),
                    })?,
                    _ => {
                        return Err(PascoError::Parse {
                            line,
                            msg: "expected `u v [w]`".into(),
                        })
                    }
                };
                let (a, b) = (ids.intern(u), ids.intern(v));
                edges.push((a, b, w));
            }
            [] => unreachable!(),
        }
    }
    let g = WeightedGraph::from_edges(ids.len(), &edges)?;
    Ok((g, ids))
}

pub fn read_edge_list(path: &Path) -> Result<(WeightedGraph, NodeIds)> {
    parse_edge_list(&fs::read_to_string(path)?)
}

/// Writes every edge once; a stored diagonal `A_uu` becomes `u u A_uu/2`.
pub fn write_edge_list<W: Write>(out: &mut W, g: &WeightedGraph, ids: &NodeIds) -> Result<()> {
    for u in 0..g.n() {
        if g.neighbor_count(u) == 0 && g.self_loop(u) == 0.0 {
            writeln!(out, "{}", ids.name(u))?;
        }
        if g.self_loop(u) > 0.0 {
            writeln!(out, "{0} {0} {1}", ids.name(u), g.self_loop(u) / 2.0)?;
        }
        let (nbrs, ws) = g.neighbors(u);
        for (&v, &w) in nbrs.iter().zip(ws) {
            if u < v {
                writeln!(out, "{} {} {}", ids.name(u), ids.name(v), w)?;
            }
        }
    }
    Ok(())
}

/// Parses `node cluster` lines. With `ids`, every known node must appear
/// exactly once; without, ids are taken from the file in order.
pub fn parse_partition(text: &str, ids: Option<&NodeIds>) -> Result<(Partition, NodeIds)> {
    let mut own = NodeIds::default();
    let mut clusters = NodeIds::default();
    let mut labels: Vec<Option<usize>> = ids.map_or_else(Vec::new, |ids| vec![None; ids.len()]);
    for (line, tokens) in content_lines(text) {
        let [node, cluster] = tokens.as_slice() else {
            return Err(PascoError::Parse {
                line,
                msg: "expected `node cluster`".into(),
            });
        };
        let i = match ids {
            Some(ids) => ids.get(node).ok_or_else(|| PascoError::Parse {
                line,
                msg: format!("unknown node `{node}`"),
            })?,
            None => {
                let i = own.intern(node);
                if i == labels.len() {
                    labels.push(None);
                }
                i
            }
        };
        if labels[i].is_some() {
            return Err(PascoError::Parse {
                line,
                msg: format!("node `{node}` listed twice"),
            });
        }
        labels[i] = Some(clusters.intern(cluster));
    }
    let ids = ids.cloned().unwrap_or(own);
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            l.ok_or_else(|| PascoError::Parse {
                line: 0,
                msg: format!("node `{}` has no cluster", ids.name(i)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((Partition::from_labels(labels), ids))
}

pub fn read_partition(path: &Path, ids: Option<&NodeIds>) -> Result<(Partition, NodeIds)> {
    parse_partition(&fs::read_to_string(path)?, ids)
}

/// One `node cluster` line per node in index order; clusters are `0..k`.
pub fn write_partition<W: Write>(out: &mut W, p: &Partition, ids: &NodeIds) -> Result<()> {
    for (i, &l) in p.labels().iter().enumerate() {
        writeln!(out, "{} {}", ids.name(i), l)?;
    }
    Ok(())
}

pub fn write_gmm_csv<W: Write>(out: &mut W, data: &GmmToyData) -> Result<()> {
    writeln!(out, "x,y,true_label")?;
    for (p, &l) in data.points.iter().zip(data.truth.labels()) {
        writeln!(out, "{},{},{}", p[0], p[1], l)?;
    }
    Ok(())
}

/// Writes to `path`, creating parent directories.
pub fn write_file(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, buf)?;
    Ok(())
}
