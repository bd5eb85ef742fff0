//! Symmetric stochastic block model with `k` equal blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PascoError, Result};
use crate::graph::WeightedGraph;
use crate::partition::Partition;

pub const MAX_REJECTIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsbmParams {
    pub n: usize,
    pub k: usize,
    /// Expected degree is `d · ln n`.
    pub d: f64,
    /// `p_out / p_in`.
    pub alpha: f64,
    pub seed: u64,
    pub require_connected: bool,
}

impl SsbmParams {
    pub fn new(n: usize, k: usize, d: f64, alpha: f64, seed: u64) -> Self {
        SsbmParams {
            n,
            k,
            d,
            alpha,
            seed,
            require_connected: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n == 0 || !self.n.is_multiple_of(self.k) {
            return Err(PascoError::InvalidParameter(format!(
                "block count {} must divide node count {}",
                self.k, self.n
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(PascoError::InvalidParameter(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if !self.d.is_finite() || self.d <= 0.0 {
            return Err(PascoError::InvalidParameter(format!("d must be positive, got {}", self.d)));
        }
        Ok(())
    }
}

/// `(p_in, p_out)` matching the expected degree `d · ln n`.
pub fn ssbm_probabilities(params: &SsbmParams) -> Result<(f64, f64)> {
    params.validate()?;
    let (n, k) = (params.n as f64, params.k as f64);
    let denom = (n / k - 1.0) + params.alpha * n * (k - 1.0) / k;
    if denom <= 0.0 {
        return Err(PascoError::InvalidParameter("no admissible node pairs".into()));
    }
    let p_in = params.d * n.ln() / denom;
    if p_in > 1.0 {
        return Err(PascoError::InfeasibleDensity(p_in));
    }
    Ok((p_in, params.alpha * p_in))
}

/// Number of failures before the next success of a Bernoulli(p) sequence.
fn skip<R: Rng + ?Sized>(rng: &mut R, log_q: f64) -> u64 {
    let u: f64 = 1.0 - rng.random::<f64>();
    let s = (u.ln() / log_q).floor();
    if s >= u64::MAX as f64 {
        u64::MAX
    } else {
        s as u64
    }
}

/// Pairs `(i, j)`, `i < j < s`, each kept with probability `p`.
fn within<R: Rng + ?Sized>(rng: &mut R, s: usize, p: f64, mut emit: impl FnMut(usize, usize)) {
    if p <= 0.0 || s < 2 {
        return;
    }
    if p >= 1.0 {
        for j in 1..s {
            (0..j).for_each(|i| emit(i, j));
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1u64, -1i64);
    let s = s as u64;
    while v < s {
        w = w.saturating_add(1).saturating_add(skip(rng, log_q).min(i64::MAX as u64) as i64);
        while w >= v as i64 && v < s {
            w -= v as i64;
            v += 1;
        }
        if v < s {
            emit(w as usize, v as usize);
        }
    }
}

/// Pairs in an `s × t` grid, each kept with probability `p`.
fn across<R: Rng + ?Sized>(rng: &mut R, s: usize, t: usize, p: f64, mut emit: impl FnMut(usize, usize)) {
    if p <= 0.0 {
        return;
    }
    let total = (s * t) as u64;
    if p >= 1.0 {
        (0..total).for_each(|x| emit((x / t as u64) as usize, (x % t as u64) as usize));
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut x = skip(rng, log_q);
    while x < total {
        emit((x / t as u64) as usize, (x % t as u64) as usize);
        x = x.saturating_add(1).saturating_add(skip(rng, log_q));
    }
}

fn sample_once(params: &SsbmParams, p_in: f64, p_out: f64, rng: &mut ChaCha8Rng) -> Result<WeightedGraph> {
    let s = params.n / params.k;
    let mut edges = Vec::new();
    for a in 0..params.k {
        let base = a * s;
        within(rng, s, p_in, |i, j| edges.push((base + i, base + j, 1.0)));
        for b in a + 1..params.k {
            let other = b * s;
            across(rng, s, s, p_out, |i, j| edges.push((base + i, other + j, 1.0)));
        }
    }
    WeightedGraph::from_edges(params.n, &edges)
}

/// Samples a graph and its block labels. With `require_connected`, rejected
/// draws are replaced by fresh ones from a new random stream.
pub fn ssbm_sample(params: &SsbmParams) -> Result<(WeightedGraph, Partition)> {
    let (p_in, p_out) = ssbm_probabilities(params)?;
    let s = params.n / params.k;
    let truth = Partition::from_labels((0..params.n).map(|u| u / s).collect());
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for attempt in 0..MAX_REJECTIONS {
        rng.set_stream(attempt as u64);
        rng.set_word_pos(0);
        let g = sample_once(params, p_in, p_out, &mut rng)?;
        if !params.require_connected || g.is_connected() {
            return Ok((g, truth));
        }
        log::debug!("ssbm attempt {attempt} disconnected, resampling");
    }
    Err(PascoError::RejectionExhausted(MAX_REJECTIONS))
}
