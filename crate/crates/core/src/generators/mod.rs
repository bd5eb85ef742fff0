//! Synthetic graphs and point clouds for experiments.

mod gmm;
mod ssbm;

pub use gmm::{centroid_partitions, gmm_toy, voronoi_partition, GmmToyData, GMM_CENTERS, GMM_SIZES, GMM_STD};
pub use ssbm::{ssbm_probabilities, ssbm_sample, SsbmParams, MAX_REJECTIONS};
