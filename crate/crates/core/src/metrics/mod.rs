//! Partition quality and coarsening fidelity scores.

mod ami;
mod rsa;
mod structure;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PascoError, Result};
use crate::graph::WeightedGraph;
use crate::partition::Partition;

pub use ami::{ami, expected_mutual_information, mutual_information};
pub use rsa::{rsa, RsaBasis};
pub use structure::{description_length, gncut, modularity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreKind {
    Ami,
    Modularity,
    Gncut,
    Dl,
}

impl ScoreKind {
    pub const ALL: [ScoreKind; 4] = [ScoreKind::Ami, ScoreKind::Modularity, ScoreKind::Gncut, ScoreKind::Dl];

    pub fn name(self) -> &'static str {
        match self {
            ScoreKind::Ami => "ami",
            ScoreKind::Modularity => "modularity",
            ScoreKind::Gncut => "gncut",
            ScoreKind::Dl => "dl",
        }
    }

    /// Parses a comma-separated list such as `ami,modularity`.
    pub fn parse_list(s: &str) -> Result<Vec<ScoreKind>> {
        let mut out: Vec<ScoreKind> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoreKind {
    type Err = PascoError;

    fn from_str(s: &str) -> Result<Self> {
        ScoreKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| PascoError::InvalidParameter(format!("unknown score `{s}`")))
    }
}

/// Relative differences `(s_est - s_true) / s_true` against a truth partition.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RelativeDiff {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modularity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gncut: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dl: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ami: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modularity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gncut: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rsa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_diff: Option<RelativeDiff>,
}

fn relative(est: Option<f64>, truth: Option<f64>) -> Option<f64> {
    match (est, truth) {
        (Some(e), Some(t)) if t != 0.0 => Some((e - t) / t),
        _ => None,
    }
}

fn structural(g: &WeightedGraph, p: &Partition, kinds: &[ScoreKind]) -> Result<ScoreReport> {
    let mut r = ScoreReport::default();
    for &kind in kinds {
        match kind {
            ScoreKind::Modularity => r.modularity = Some(modularity(g, p)?),
            ScoreKind::Gncut => r.gncut = Some(gncut(g, p)?),
            ScoreKind::Dl => r.dl = Some(description_length(g, p)?),
            ScoreKind::Ami => {}
        }
    }
    Ok(r)
}

/// Scores `p` on `g`. AMI and relative differences need `truth`.
pub fn score_partition(
    g: &WeightedGraph,
    p: &Partition,
    truth: Option<&Partition>,
    kinds: &[ScoreKind],
) -> Result<ScoreReport> {
    let mut report = structural(g, p, kinds)?;
    if let Some(t) = truth {
        if kinds.contains(&ScoreKind::Ami) {
            report.ami = Some(ami(p, t)?);
        }
        if kinds.iter().any(|&k| k != ScoreKind::Ami) {
            let base = structural(g, t, kinds)?;
            report.relative_diff = Some(RelativeDiff {
                modularity: relative(report.modularity, base.modularity),
                gncut: relative(report.gncut, base.gncut),
                dl: relative(report.dl, base.dl),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_score_list() {
        assert_eq!(
            ScoreKind::parse_list("modularity, ami,ami").unwrap(),
            vec![ScoreKind::Ami, ScoreKind::Modularity]
        );
        assert!(ScoreKind::parse_list("ami,foo").is_err());
    }

    #[test]
    fn report_against_truth() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0), (1, 2, 0.1)]).unwrap();
        let truth = Partition::from_labels(vec![0, 0, 1, 1]);
        let r = score_partition(&g, &truth, Some(&truth), &ScoreKind::ALL).unwrap();
        assert!((r.ami.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.relative_diff.unwrap().modularity, Some(0.0));
        let json = serde_json::to_value(score_partition(&g, &truth, None, &[ScoreKind::Gncut]).unwrap()).unwrap();
        assert!(json.get("gncut").is_some() && json.get("ami").is_none());
    }
}
