//! Clustering back-ends for (coarsened) weighted graphs.

mod kmeans;
mod louvain;
mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PascoError, Result};
use crate::graph::WeightedGraph;
use crate::partition::Partition;

pub use kmeans::{kmeans, KMeansConfig, KMeansFit};
pub use louvain::greedy_modularity;
pub use spectral::{spectral, spectral_embedding, MAX_DENSE_NODES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterMethod {
    GreedyModularity,
    Spectral,
}

impl ClusterMethod {
    pub fn name(self) -> &'static str {
        match self {
            ClusterMethod::GreedyModularity => "greedy-modularity",
            ClusterMethod::Spectral => "spectral",
        }
    }
}

impl fmt::Display for ClusterMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClusterMethod {
    type Err = PascoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy-modularity" => Ok(ClusterMethod::GreedyModularity),
            "spectral" => Ok(ClusterMethod::Spectral),
            _ => Err(PascoError::InvalidParameter(format!("unknown clusterer `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaplacianKind {
    #[default]
    SymmetricNormalized,
    Combinatorial,
}

#[derive(Debug, Clone, Copy)]
pub struct ClusterRequest<'a> {
    pub graph: &'a WeightedGraph,
    /// Required by spectral, ignored by greedy modularity.
    pub k: Option<usize>,
    pub seed: u64,
}

/// Anything that turns a weighted graph into a hard partition.
pub trait Clusterer: Send + Sync {
    fn name(&self) -> &str;
    fn cluster(&self, req: &ClusterRequest<'_>) -> Result<Partition>;
}

/// Configuration of a built-in clusterer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClustererConfig {
    pub method: ClusterMethod,
    pub k: Option<usize>,
    #[serde(default)]
    pub laplacian: LaplacianKind,
}

impl ClustererConfig {
    pub fn greedy_modularity() -> Self {
        ClustererConfig {
            method: ClusterMethod::GreedyModularity,
            k: None,
            laplacian: LaplacianKind::default(),
        }
    }

    pub fn spectral(k: usize) -> Self {
        ClustererConfig {
            method: ClusterMethod::Spectral,
            k: Some(k),
            laplacian: LaplacianKind::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.method == ClusterMethod::Spectral && self.k.is_none() {
            return Err(PascoError::InvalidParameter("spectral clustering requires k".into()));
        }
        if self.k == Some(0) {
            return Err(PascoError::InvalidParameter("k must be >= 1".into()));
        }
        Ok(())
    }

    pub fn run(&self, graph: &WeightedGraph, seed: u64) -> Result<Partition> {
        self.cluster(&ClusterRequest {
            graph,
            k: self.k,
            seed,
        })
    }
}

impl Clusterer for ClustererConfig {
    fn name(&self) -> &str {
        self.method.name()
    }

    fn cluster(&self, req: &ClusterRequest<'_>) -> Result<Partition> {
        match self.method {
            ClusterMethod::GreedyModularity => greedy_modularity(req.graph, req.seed),
            ClusterMethod::Spectral => {
                let k = req.k.or(self.k).ok_or_else(|| {
                    PascoError::InvalidParameter("spectral clustering requires k".into())
                })?;
                spectral(req.graph, k, req.seed, self.laplacian)
            }
        }
    }
}

/// Runs a built-in method with default options.
pub fn cluster(req: &ClusterRequest<'_>, method: ClusterMethod) -> Result<Partition> {
    let cfg = ClustererConfig {
        method,
        k: req.k,
        laplacian: LaplacianKind::default(),
    };
    if method == ClusterMethod::Spectral && req.k.is_none() {
        return Err(PascoError::InvalidParameter("spectral clustering requires k".into()));
    }
    cfg.cluster(req)
}
