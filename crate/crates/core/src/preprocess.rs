//! Min-max rescaling, elbow-based radius selection and DBSCAN denoising.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-feature ranges fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaleParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl RescaleParams {
    pub fn fit(data: &[Vec<f64>]) -> Result<Self> {
        let width = check_matrix(data)?;
        let mut min = vec![f64::INFINITY; width];
        let mut max = vec![f64::NEG_INFINITY; width];
        for row in data {
            for (j, &v) in row.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(Self { min, max })
    }

    /// Indices of features whose fitted range is empty.
    pub fn constant_features(&self) -> Vec<usize> {
        (0..self.min.len()).filter(|&j| self.max[j] == self.min[j]).collect()
    }

    /// `(x − min) / (max − min)`, with constant features mapped to 0. Values
    /// outside the fitted range are not clipped.
    pub fn transform(&self, data: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        data.iter()
            .map(|row| {
                if row.len() != self.min.len() {
                    return Err(Error::usage(format!(
                        "row has {} features, rescaler was fitted on {}",
                        row.len(),
                        self.min.len()
                    )));
                }
                Ok(row
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let span = self.max[j] - self.min[j];
                        if span > 0.0 {
                            (v - self.min[j]) / span
                        } else {
                            0.0
                        }
                    })
                    .collect())
            })
            .collect()
    }
}

pub fn rescale_fit_transform(data: &[Vec<f64>]) -> Result<(RescaleParams, Vec<Vec<f64>>)> {
    let params = RescaleParams::fit(data)?;
    let scaled = params.transform(data)?;
    Ok((params, scaled))
}

fn check_matrix(data: &[Vec<f64>]) -> Result<usize> {
    let width = data.first().ok_or_else(|| Error::usage("empty dataset"))?.len();
    if data.iter().any(|r| r.len() != width) {
        return Err(Error::usage("rows have differing widths"));
    }
    Ok(width)
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Which sorted distance curve the knee is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ElbowMode {
    /// All `n(n−1)/2` pairwise distances.
    #[default]
    AllPairs,
    /// Each point's distance to its `k`-th nearest other point.
    KDistance { k: usize },
}

/// Knee of the sorted pairwise-distance curve.
pub fn elbow_eps(data: &[Vec<f64>]) -> Result<f64> {
    elbow_eps_with(data, ElbowMode::AllPairs)
}

/// Knee of a sorted distance curve: the value `d_i` maximizing
/// `d_{i+1} − 2 d_i + d_{i−1}`, earliest index on ties. A zero knee (all or
/// most points identical) falls back to a machine-epsilon-scaled radius.
pub fn elbow_eps_with(data: &[Vec<f64>], mode: ElbowMode) -> Result<f64> {
    check_matrix(data)?;
    let n = data.len();
    if n < 3 {
        return Err(Error::usage(format!("elbow selection needs at least 3 rows, got {n}")));
    }
    let mut d: Vec<f64> = match mode {
        ElbowMode::AllPairs => {
            (0..n).into_par_iter().flat_map_iter(|i| (i + 1..n).map(move |j| distance(&data[i], &data[j]))).collect()
        }
        ElbowMode::KDistance { k } => {
            if k == 0 || k >= n {
                return Err(Error::usage(format!("k-distance needs 1 <= k < {n}, got {k}")));
            }
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| distance(&data[i], &data[j])).collect();
                    row.sort_by(f64::total_cmp);
                    row[k - 1]
                })
                .collect()
        }
    };
    d.sort_by(f64::total_cmp);
    let knee = if d.len() < 3 || d[0] == d[d.len() - 1] {
        d[0]
    } else {
        let mut best = 1;
        let mut best_val = f64::NEG_INFINITY;
        for i in 1..d.len() - 1 {
            let s = d[i + 1] - 2.0 * d[i] + d[i - 1];
            if s > best_val {
                best_val = s;
                best = i;
            }
        }
        d[best]
    };
    if knee > 0.0 {
        return Ok(knee);
    }
    let scale = data.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    let fallback = 16.0 * f64::EPSILON * scale;
    log::warn!("distance knee is zero (duplicate points); using fallback eps {fallback:e}");
    Ok(fallback)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbscanConfig {
    pub eps: f64,
    pub min_samples: usize,
}

impl DbscanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::config("DBSCAN eps must be positive and finite"));
        }
        if self.min_samples == 0 {
            return Err(Error::config("DBSCAN min_samples must be at least 1"));
        }
        Ok(())
    }
}

pub const NOISE: i64 = -1;

/// Density-based clustering. Neighborhoods are closed balls of radius `eps`
/// and include the point itself; a core point has at least `min_samples`
/// neighbors. Clusters are numbered in order of their lowest-index core
/// point, and a border point joins the first cluster that reaches it.
/// Unreached points are [`NOISE`].
pub fn dbscan(data: &[Vec<f64>], config: &DbscanConfig) -> Result<Vec<i64>> {
    check_matrix(data)?;
    config.validate()?;
    let n = data.len();
    let neighbors: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).filter(|&j| distance(&data[i], &data[j]) <= config.eps).collect())
        .collect();
    let core: Vec<bool> = neighbors.iter().map(|nb| nb.len() >= config.min_samples).collect();
    let mut labels = vec![NOISE; n];
    let mut next = 0;
    for start in 0..n {
        if labels[start] != NOISE || !core[start] {
            continue;
        }
        labels[start] = next;
        let mut stack = vec![start];
        while let Some(p) = stack.pop() {
            for &q in &neighbors[p] {
                if labels[q] == NOISE {
                    labels[q] = next;
                    if core[q] {
                        stack.push(q);
                    }
                }
            }
        }
        next += 1;
    }
    Ok(labels)
}

/// Overrides for [`denoise_with`]; unset fields use the automatic choices.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DenoiseConfig {
    pub eps: Option<f64>,
    pub min_samples: Option<usize>,
    pub elbow: ElbowMode,
}

/// Outcome of [`denoise_with`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Denoised {
    pub data: Vec<Vec<f64>>,
    /// Original indices of the retained rows.
    pub kept: Vec<usize>,
    pub eps: f64,
    pub min_samples: usize,
}

/// `max(2, ⌈0.02 n⌉)`.
pub fn default_min_samples(n: usize) -> usize {
    ((0.02 * n as f64).ceil() as usize).max(2)
}

/// Removes DBSCAN noise with the elbow radius and default density.
pub fn denoise(data: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    Ok(denoise_with(data, &DenoiseConfig::default())?.data)
}

pub fn denoise_with(data: &[Vec<f64>], config: &DenoiseConfig) -> Result<Denoised> {
    check_matrix(data)?;
    let n = data.len();
    if n < 3 {
        return Err(Error::usage(format!("denoising needs at least 3 rows, got {n}")));
    }
    let eps = match config.eps {
        Some(e) => e,
        None => elbow_eps_with(data, config.elbow)?,
    };
    let min_samples = config.min_samples.unwrap_or_else(|| default_min_samples(n));
    let labels = dbscan(data, &DbscanConfig { eps, min_samples })?;
    let kept: Vec<usize> = (0..n).filter(|&i| labels[i] != NOISE).collect();
    if kept.is_empty() {
        return Err(Error::Denoise(format!(
            "every row is noise at eps {eps:e}, min_samples {min_samples}; set eps manually"
        )));
    }
    if 2 * (n - kept.len()) > n {
        return Err(Error::Denoise(format!(
            "eps {eps:e} would remove {} of {n} rows; set eps manually",
            n - kept.len()
        )));
    }
    Ok(Denoised { data: kept.iter().map(|&i| data[i].clone()).collect(), kept, eps, min_samples })
}
