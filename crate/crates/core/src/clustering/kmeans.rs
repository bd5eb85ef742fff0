//! Seeded Lloyd k-means with k-means++ initialization.

use rand::Rng;

use crate::error::{PascoError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative inertia change below which a run stops.
    pub tol: f64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            restarts: 20,
            max_iters: 300,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub labels: Vec<usize>,
    pub centers: Vec<f64>,
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centers: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.chunks_exact(dim).enumerate() {
        let d = sq_dist(point, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus<R: Rng + ?Sized>(points: &[f64], dim: usize, k: usize, rng: &mut R) -> Vec<f64> {
    let n = points.len() / dim;
    let mut centers = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..n);
    centers.extend_from_slice(&points[first * dim..(first + 1) * dim]);
    let mut d2: Vec<f64> = points
        .chunks_exact(dim)
        .map(|p| sq_dist(p, &centers[..dim]))
        .collect();
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut t = rng.random::<f64>() * total;
            let mut idx = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if t < w {
                    idx = i;
                    break;
                }
                t -= w;
            }
            idx
        } else {
            rng.random_range(0..n)
        };
        let c = &points[pick * dim..(pick + 1) * dim];
        centers.extend_from_slice(c);
        for (p, d) in points.chunks_exact(dim).zip(d2.iter_mut()) {
            *d = d.min(sq_dist(p, c));
        }
    }
    centers
}

fn lloyd(points: &[f64], dim: usize, mut centers: Vec<f64>, cfg: &KMeansConfig) -> KMeansFit {
    let n = points.len() / dim;
    let k = centers.len() / dim;
    let mut labels = vec![0usize; n];
    let mut dists = vec![0.0f64; n];
    let mut prev = f64::INFINITY;
    let mut inertia = f64::INFINITY;
    for _ in 0..cfg.max_iters {
        inertia = 0.0;
        for (i, p) in points.chunks_exact(dim).enumerate() {
            let (c, d) = nearest(p, &centers, dim);
            labels[i] = c;
            dists[i] = d;
            inertia += d;
        }
        // Empty-cluster repair: steal the point farthest from its center.
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let far = (0..n)
                .filter(|&i| counts[labels[i]] > 1)
                .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)));
            if let Some(i) = far {
                counts[labels[i]] -= 1;
                counts[c] = 1;
                labels[i] = c;
                inertia -= dists[i];
                dists[i] = 0.0;
            }
        }
        centers.iter_mut().for_each(|x| *x = 0.0);
        for (i, p) in points.chunks_exact(dim).enumerate() {
            let c = &mut centers[labels[i] * dim..(labels[i] + 1) * dim];
            c.iter_mut().zip(p).for_each(|(a, b)| *a += b);
        }
        for (c, center) in centers.chunks_exact_mut(dim).enumerate() {
            let s = counts[c].max(1) as f64;
            center.iter_mut().for_each(|x| *x /= s);
        }
        if (prev - inertia).abs() <= cfg.tol * prev.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        prev = inertia;
    }
    KMeansFit {
        labels,
        centers,
        inertia,
    }
}

/// Best of `cfg.restarts` seeded runs on `n × dim` row-major `points`.
pub fn kmeans<R: Rng + ?Sized>(
    points: &[f64],
    dim: usize,
    k: usize,
    cfg: &KMeansConfig,
    rng: &mut R,
) -> Result<KMeansFit> {
    if dim == 0 || points.is_empty() || !points.len().is_multiple_of(dim) {
        return Err(PascoError::Empty("k-means input"));
    }
    let n = points.len() / dim;
    if k == 0 || k > n {
        return Err(PascoError::InvalidParameter(format!("k-means needs 1 <= k <= {n}, got {k}")));
    }
    let mut best: Option<KMeansFit> = None;
    for _ in 0..cfg.restarts.max(1) {
        let init = plus_plus(points, dim, k, rng);
        let fit = lloyd(points, dim, init, cfg);
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}
