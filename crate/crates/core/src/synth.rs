//! Seeded Gaussian-mixture datasets with planted outliers.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::rng::{self, tags};

/// Distance of every cluster center from the origin, in units of the
/// within-cluster standard deviation.
pub const CENTER_RADIUS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_features: usize,
    pub n_clusters: usize,
    pub n_inliers: usize,
    /// Outliers per inlier, in `(0, 0.5)`.
    pub outlier_fraction: f64,
    /// Minimum outlier distance from every center, in standard deviations.
    pub outlier_separation_sigma: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_features: 8,
            n_clusters: 3,
            n_inliers: 1000,
            outlier_fraction: 0.05,
            outlier_separation_sigma: 6.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_features == 0 || self.n_clusters == 0 || self.n_inliers == 0 {
            return Err(Error::config("synthetic dataset needs features, clusters and inliers"));
        }
        if self.n_clusters > 2 * self.n_features {
            return Err(Error::config(format!(
                "{} clusters cannot be placed {CENTER_RADIUS}σ apart in {} dimensions (at most {})",
                self.n_clusters,
                self.n_features,
                2 * self.n_features
            )));
        }
        if !(self.outlier_fraction > 0.0 && self.outlier_fraction < 0.5) {
            return Err(Error::config("outlier_fraction must lie in (0, 0.5)"));
        }
        if !(self.outlier_separation_sigma >= 0.0 && self.outlier_separation_sigma.is_finite()) {
            return Err(Error::config("outlier_separation_sigma must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn n_outliers(&self) -> usize {
        (self.outlier_fraction * self.n_inliers as f64).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthData {
    pub data: Vec<Vec<f64>>,
    /// `true` marks a planted outlier.
    pub labels: Vec<bool>,
    pub centers: Vec<Vec<f64>>,
}

impl SynthData {
    /// CSV with header `f0,…,f{n−1},label`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let width = self.data.first().map_or(0, Vec::len);
        let mut header: Vec<String> = (0..width).map(|i| format!("f{i}")).collect();
        header.push("label".into());
        w.write_record(&header)?;
        for (row, &label) in self.data.iter().zip(&self.labels) {
            let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            record.push(if label { "1" } else { "0" }.into());
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Cluster `k` sits at `±CENTER_RADIUS` on axis `k / 2`.
fn centers(config: &SynthConfig) -> Vec<Vec<f64>> {
    (0..config.n_clusters)
        .map(|k| {
            let mut c = vec![0.0; config.n_features];
            c[k / 2] = if k % 2 == 0 { CENTER_RADIUS } else { -CENTER_RADIUS };
            c
        })
        .collect()
}

/// Unit-variance clusters (inliers assigned round-robin) plus outliers at
/// radius `CENTER_RADIUS + s + U[0, s]` along uniform random directions,
/// where `s` is the separation. Rows are shuffled.
pub fn generate(config: &SynthConfig) -> Result<SynthData> {
    config.validate()?;
    let mut rng = rng::tagged(config.seed, tags::SYNTH, 0);
    let centers = centers(config);
    let sep = config.outlier_separation_sigma;
    let mut rows: Vec<(Vec<f64>, bool)> = Vec::with_capacity(config.n_inliers + config.n_outliers());
    for i in 0..config.n_inliers {
        let c = &centers[i % config.n_clusters];
        let x = c.iter().map(|m| m + rng.sample::<f64, _>(StandardNormal)).collect();
        rows.push((x, false));
    }
    for _ in 0..config.n_outliers() {
        let dir = loop {
            let v: Vec<f64> = (0..config.n_features).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break v.into_iter().map(|a| a / norm).collect::<Vec<f64>>();
            }
        };
        let radius = CENTER_RADIUS + sep + rng.random_range(0.0..=sep);
        rows.push((dir.into_iter().map(|a| a * radius).collect(), true));
    }
    rows.shuffle(&mut rng);
    let (data, labels) = rows.into_iter().unzip();
    Ok(SynthData { data, labels, centers })
}
