//! Fixtures shared by the benchmarks.

use hae_core::synth::{generate, SynthConfig};

/// Rescaled-scale synthetic rows: `n_inliers` inliers plus 5% planted outliers.
pub fn synthetic_rows(n_features: usize, n_inliers: usize, seed: u64) -> Vec<Vec<f64>> {
    generate(&SynthConfig { n_features, n_clusters: 2, n_inliers, seed, ..Default::default() })
        .expect("valid synthetic config")
        .data
}

/// Deterministic parameter and input vectors of the given lengths.
pub fn angles(n: usize, offset: f64) -> Vec<f64> {
    (0..n).map(|i| ((i as f64 + offset) * 0.7).sin()).collect()
}
