use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum PascoError {
    #[error("node index {index} out of range for {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("invalid edge weight {0}")]
    InvalidWeight(f64),

    #[error("size mismatch in {context}: expected {expected}, found {found}")]
    SizeMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cluster {0} is empty")]
    EmptyCluster(usize),

    #[error("graph has zero total weight")]
    ZeroWeight,

    #[error("cluster {0} has zero volume")]
    ZeroVolume(usize),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("graph with {n} nodes exceeds the dense solver limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("degenerate spectral embedding: {0}")]
    Degenerate(String),

    #[error("solver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("infeasible SSBM density: p_in = {0} > 1")]
    InfeasibleDensity(f64),

    #[error("connectivity rejection sampling exhausted after {0} attempts")]
    RejectionExhausted(usize),

    #[error("replica {index}: {source}")]
    Replica {
        index: usize,
        #[source]
        source: Box<PascoError>,
    },

    #[error("all {0} replicas failed")]
    AllReplicasFailed(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PascoError {
    pub(crate) fn replica(index: usize, source: PascoError) -> Self {
        PascoError::Replica {
            index,
            source: Box::new(source),
        }
    }
}

pub type Result<T> = std::result::Result<T, PascoError>;
