//! Isolation Forest anomaly detection.

use rand::distr::Open01;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, tags};

const EULER_GAMMA: f64 = 0.577_215_664_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Rows drawn per tree; clipped to the dataset size.
    pub subsample_size: usize,
    /// Expected outlier fraction, in `(0, 0.5]`.
    pub contamination: f64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self { n_trees: 100, subsample_size: 256, contamination: 0.1 }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::config("forest needs at least one tree"));
        }
        if self.subsample_size < 2 {
            return Err(Error::config("subsample size must be at least 2"));
        }
        if !(self.contamination > 0.0 && self.contamination <= 0.5) {
            return Err(Error::config("contamination must lie in (0, 0.5]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum IsoNode {
    Split { feature: usize, threshold: f64, left: Box<IsoNode>, right: Box<IsoNode> },
    Leaf { size: usize, depth: usize },
}

impl IsoNode {
    /// Depth reached by `x` plus the expected remaining depth of its leaf.
    pub fn path_length(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                IsoNode::Split { feature, threshold, left, right } => {
                    node = if x[*feature] < *threshold { left } else { right };
                }
                IsoNode::Leaf { size, depth } => return *depth as f64 + average_path_length(*size),
            }
        }
    }
}

/// Expected unsuccessful-search depth in a random binary tree of `m` items.
pub fn average_path_length(m: usize) -> f64 {
    match m {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => {
            let m = m as f64;
            2.0 * ((m - 1.0).ln() + EULER_GAMMA) - 2.0 * (m - 1.0) / m
        }
    }
}

/// Draws consumed while growing a tree.
pub trait RandomSource {
    /// Uniform integer in `0..n`.
    fn index(&mut self, n: usize) -> usize;
    /// Uniform real in the open interval `(0, 1)`.
    fn unit(&mut self) -> f64;
}

impl RandomSource for rng::Rng {
    fn index(&mut self, n: usize) -> usize {
        self.random_range(0..n)
    }

    fn unit(&mut self) -> f64 {
        self.sample(Open01)
    }
}

/// `psi` distinct row indices of `0..n` by partial Fisher-Yates; all rows in
/// order when `psi >= n`.
pub fn subsample(n: usize, psi: usize, source: &mut dyn RandomSource) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    if psi >= n {
        return idx;
    }
    for i in 0..psi {
        let j = i + source.index(n - i);
        idx.swap(i, j);
    }
    idx.truncate(psi);
    idx
}

/// Grows one isolation tree over `rows` of `data`.
///
/// A node becomes a leaf when it holds at most one row, when all its rows
/// are identical, or at `height_limit`. Otherwise a feature is drawn
/// uniformly among those that vary over the node's rows and the threshold is
/// `min + u (max − min)` with `u ∈ (0, 1)`; rows with `x < threshold` go left.
pub fn build_tree(data: &[Vec<f64>], rows: &[usize], height_limit: usize, source: &mut dyn RandomSource) -> IsoNode {
    grow(data, rows.to_vec(), 0, height_limit, source)
}

fn grow(
    data: &[Vec<f64>],
    rows: Vec<usize>,
    depth: usize,
    height_limit: usize,
    source: &mut dyn RandomSource,
) -> IsoNode {
    let leaf = |rows: &[usize]| IsoNode::Leaf { size: rows.len(), depth };
    if rows.len() <= 1 || depth >= height_limit {
        return leaf(&rows);
    }
    let width = data[rows[0]].len();
    let ranges: Vec<(usize, f64, f64)> = (0..width)
        .filter_map(|f| {
            let (lo, hi) = rows
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(data[r][f]), hi.max(data[r][f])));
            (hi > lo).then_some((f, lo, hi))
        })
        .collect();
    if ranges.is_empty() {
        return leaf(&rows);
    }
    let (feature, lo, hi) = ranges[source.index(ranges.len())];
    let u = source.unit();
    let mut threshold = lo + u * (hi - lo);
    if !(threshold > lo && threshold <= hi) {
        // Rounding collapsed onto an endpoint; `hi` still separates the rows.
        threshold = hi;
    }
    let (left, right): (Vec<usize>, Vec<usize>) = rows.into_iter().partition(|&r| data[r][feature] < threshold);
    IsoNode::Split {
        feature,
        threshold,
        left: Box::new(grow(data, left, depth + 1, height_limit, source)),
        right: Box::new(grow(data, right, depth + 1, height_limit, source)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoForest {
    pub trees: Vec<IsoNode>,
    pub n_trees: usize,
    /// Effective subsample size.
    pub subsample_size: usize,
    pub height_limit: usize,
    pub contamination: f64,
    /// Scores above this are outliers.
    pub score_threshold: f64,
    pub n_features: usize,
    pub seed: u64,
    /// Set when every training score was identical.
    pub degenerate: bool,
}

impl IsoForest {
    pub fn fit(data: &[Vec<f64>], config: &ForestConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        if data.len() < 2 {
            return Err(Error::usage(format!("forest needs at least 2 rows, got {}", data.len())));
        }
        let n_features = data[0].len();
        if n_features == 0 || data.iter().any(|r| r.len() != n_features) {
            return Err(Error::usage("forest rows must share a nonzero width"));
        }
        if data.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::usage("forest data contains non-finite values"));
        }
        let psi = config.subsample_size.min(data.len());
        let height_limit = (psi as f64).log2().ceil() as usize;
        let trees: Vec<IsoNode> = (0..config.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = rng::tagged(seed, tags::FOREST, t as u64);
                let rows = subsample(data.len(), psi, &mut rng);
                build_tree(data, &rows, height_limit, &mut rng)
            })
            .collect();
        let mut forest = Self {
            trees,
            n_trees: config.n_trees,
            subsample_size: psi,
            height_limit,
            contamination: config.contamination,
            score_threshold: 0.5,
            n_features,
            seed,
            degenerate: false,
        };
        let mut scores = forest.scores(data)?;
        scores.sort_by(f64::total_cmp);
        forest.degenerate = scores[0] == scores[scores.len() - 1];
        if forest.degenerate {
            log::warn!("all training anomaly scores are equal; the outlier threshold is degenerate");
        }
        forest.score_threshold = quantile_sorted(&scores, 1.0 - config.contamination);
        Ok(forest)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::usage(format!("point has {} features, forest expects {}", x.len(), self.n_features)));
        }
        Ok(())
    }

    /// Mean path length of `x` over all trees.
    pub fn mean_path_length(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.trees.iter().map(|t| t.path_length(x)).sum::<f64>() / self.trees.len() as f64)
    }

    /// `2^(−E[h(x)] / c(ψ))`.
    pub fn anomaly_score(&self, x: &[f64]) -> Result<f64> {
        let h = self.mean_path_length(x)?;
        Ok(2f64.powf(-h / average_path_length(self.subsample_size)))
    }

    pub fn scores(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        points.par_iter().map(|x| self.anomaly_score(x)).collect()
    }

    /// `true` where the score exceeds the fitted threshold.
    pub fn predict(&self, points: &[Vec<f64>]) -> Result<Vec<bool>> {
        Ok(self.scores(points)?.into_iter().map(|s| s > self.score_threshold).collect())
    }
}

/// Linearly interpolated quantile of ascending `sorted`.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}
