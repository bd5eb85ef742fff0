//! Planar three-component Gaussian mixture and random Voronoi partitions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{PascoError, Result};
use crate::partition::Partition;

pub const GMM_SIZES: [usize; 3] = [500, 400, 200];
pub const GMM_CENTERS: [[f64; 2]; 3] = [[0.0, 1.0], [1.0, 0.0], [0.0, 0.0]];
pub const GMM_STD: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct GmmToyData {
    pub points: Vec<[f64; 2]>,
    pub truth: Partition,
}

pub fn gmm_toy(seed: u64) -> GmmToyData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, GMM_STD).expect("valid standard deviation");
    let mut points = Vec::with_capacity(GMM_SIZES.iter().sum());
    let mut labels = Vec::with_capacity(points.capacity());
    for (c, (&size, center)) in GMM_SIZES.iter().zip(&GMM_CENTERS).enumerate() {
        for _ in 0..size {
            points.push([center[0] + noise.sample(&mut rng), center[1] + noise.sample(&mut rng)]);
            labels.push(c);
        }
    }
    GmmToyData {
        points,
        truth: Partition::from_labels(labels),
    }
}

/// Nearest-centroid assignment, ties to the smallest centroid index.
pub fn voronoi_partition(points: &[[f64; 2]], centroids: &[[f64; 2]]) -> Partition {
    let labels = points
        .iter()
        .map(|p| {
            let mut best = (0, f64::INFINITY);
            for (c, q) in centroids.iter().enumerate() {
                let d = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best.0
        })
        .collect();
    Partition::from_labels(labels)
}

/// `r` partitions, each from `k ∈ [3, 10]` centroids: one drawn inside every
/// true cluster, the rest among the other points.
pub fn centroid_partitions(data: &GmmToyData, r: usize, seed: u64) -> Result<Vec<Partition>> {
    if r == 0 {
        return Err(PascoError::InvalidParameter("need at least one partition".into()));
    }
    let truth_k = data.truth.k();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); truth_k];
    for (i, &l) in data.truth.labels().iter().enumerate() {
        members[l].push(i);
    }
    let n = data.points.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(r);
    for _ in 0..r {
        let k = rng.random_range(3..=10usize).max(truth_k).min(n);
        let mut chosen: Vec<usize> = members
            .iter()
            .map(|m| m[rng.random_range(0..m.len())])
            .collect();
        let mut rest: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
        for _ in truth_k..k {
            let j = rng.random_range(0..rest.len());
            chosen.push(rest.swap_remove(j));
        }
        let centroids: Vec<[f64; 2]> = chosen.iter().map(|&i| data.points[i]).collect();
        out.push(voronoi_partition(&data.points, &centroids));
    }
    Ok(out)
}
