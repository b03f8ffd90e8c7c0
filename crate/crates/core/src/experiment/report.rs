//! Run and sweep reports.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

use super::ExperimentConfig;
use crate::autoencoder::ModelKind;
use crate::descriptors::{format_correlation_table, CorrelationBlock, DescriptorReport};
use crate::error::Result;
use crate::metrics::EvalResult;

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Per-dimension summary of a latent matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentStats {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub mean: Vec<f64>,
}

impl LatentStats {
    pub fn of(latent: &[Vec<f64>]) -> Self {
        let width = latent.first().map_or(0, Vec::len);
        let mut min = vec![f64::INFINITY; width];
        let mut max = vec![f64::NEG_INFINITY; width];
        let mut mean = vec![0.0; width];
        for row in latent {
            for (j, &v) in row.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
                mean[j] += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= latent.len().max(1) as f64);
        Self { min, max, mean }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenoiseSummary {
    pub eps: f64,
    pub min_samples: usize,
    pub removed: usize,
}

/// One training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatReport {
    pub seed: u64,
    pub initial_loss: f64,
    pub loss_history: Vec<f64>,
    /// Training-set loss after the last epoch.
    pub final_loss: f64,
    /// Reconstruction loss on the test split.
    pub test_loss: f64,
    pub score_threshold: f64,
    pub n_flagged: usize,
    pub metrics: Option<EvalResult>,
    pub latent: LatentStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Arithmetic means over repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageReport {
    pub final_loss: f64,
    pub test_loss: f64,
    pub metrics: Option<MeanMetrics>,
}

impl AverageReport {
    pub fn of(repeats: &[RepeatReport]) -> Self {
        let n = repeats.len() as f64;
        let mean = |f: &dyn Fn(&RepeatReport) -> f64| repeats.iter().map(f).sum::<f64>() / n;
        let metrics = repeats.iter().all(|r| r.metrics.is_some()).then(|| MeanMetrics {
            precision: mean(&|r| r.metrics.expect("checked").precision),
            recall: mean(&|r| r.metrics.expect("checked").recall),
            f1: mean(&|r| r.metrics.expect("checked").f1),
        });
        Self { final_loss: mean(&|r| r.final_loss), test_loss: mean(&|r| r.test_loss), metrics }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub model: ModelKind,
    pub circuit_id: Option<u32>,
    pub config: ExperimentConfig,
    pub n_features: usize,
    pub n_train: usize,
    /// Training rows left after denoising.
    pub n_train_used: usize,
    pub n_test: usize,
    pub windowed: bool,
    pub denoise: Option<DenoiseSummary>,
    pub repeats: Vec<RepeatReport>,
    pub average: AverageReport,
    pub descriptors: Option<DescriptorReport>,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Aligned-column summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let circuit = self.circuit_id.map(|c| format!(" circuit {c}")).unwrap_or_default();
        let _ = writeln!(out, "model {}{circuit}", self.model.name());
        let _ = writeln!(
            out,
            "rows: train {} (used {}), test {}, features {}",
            self.n_train, self.n_train_used, self.n_test, self.n_features
        );
        if let Some(d) = &self.denoise {
            let _ = writeln!(out, "denoise: eps {:.4e}, min_samples {}, removed {}", d.eps, d.min_samples, d.removed);
        }
        let _ = writeln!(
            out,
            "{:>8} {:>12} {:>12} {:>10} {:>10} {:>10} {:>8}",
            "seed", "train loss", "test loss", "precision", "recall", "f1", "flagged"
        );
        let cell = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
        for r in &self.repeats {
            let _ = writeln!(
                out,
                "{:>8} {:>12.4e} {:>12.4e} {:>10} {:>10} {:>10} {:>8}",
                r.seed,
                r.final_loss,
                r.test_loss,
                cell(r.metrics.map(|m| m.precision)),
                cell(r.metrics.map(|m| m.recall)),
                cell(r.metrics.map(|m| m.f1)),
                r.n_flagged
            );
        }
        let a = &self.average;
        let _ = writeln!(
            out,
            "{:>8} {:>12.4e} {:>12.4e} {:>10} {:>10} {:>10}",
            "mean",
            a.final_loss,
            a.test_loss,
            cell(a.metrics.map(|m| m.precision)),
            cell(a.metrics.map(|m| m.recall)),
            cell(a.metrics.map(|m| m.f1))
        );
        if let Some(d) = &self.descriptors {
            let _ = writeln!(
                out,
                "descriptors: params {}, entangling layers {}, expressivity {:.4}, Meyer-Wallach {:.4}, frequencies {}, phases {}, amplitude variance {:.4e}",
                d.n_params,
                d.n_entangling_layers,
                d.sim_expressivity,
                d.meyer_wallach,
                d.n_positive_frequencies,
                d.n_phases,
                d.amplitude_variance
            );
        }
        let _ = writeln!(out, "wall clock: {:.2} s", self.wall_clock_seconds);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub runs: Vec<RunReport>,
    pub descriptors: Vec<DescriptorReport>,
    pub correlations: Vec<CorrelationBlock>,
}

impl SweepReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>4} {:>10} {:>10} {:>10} {:>12} {:>8} {:>12}",
            "id", "precision", "recall", "f1", "train loss", "params", "expressivity"
        );
        for (run, d) in self.runs.iter().zip(&self.descriptors) {
            let m = run.average.metrics;
            let _ = writeln!(
                out,
                "{:>4} {:>10.4} {:>10.4} {:>10.4} {:>12.4e} {:>8} {:>12.4}",
                run.circuit_id.unwrap_or(0),
                m.map_or(f64::NAN, |m| m.precision),
                m.map_or(f64::NAN, |m| m.recall),
                m.map_or(f64::NAN, |m| m.f1),
                run.average.final_loss,
                d.n_params,
                d.sim_expressivity
            );
        }
        out.push('\n');
        out.push_str(&format_correlation_table(&self.correlations));
        out
    }
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}
