//! End-to-end detection runs: rescale, optional denoising, autoencoder
//! training, Isolation Forest on the training latent, scoring of the test
//! split, and reports.

mod data;
mod report;
pub mod svg;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::autoencoder::{encode_latent, loss, reconstruct, train, LossKind, Model, ModelKind, TrainConfig};
use crate::circuits::{build_circuit, CircuitSpec, ZOO_SIZE};
use crate::descriptors::{correlation_table, describe, CircuitOutcome, CorrelationMethod, DescriptorConfig};
use crate::error::{Error, Result};
use crate::metrics::{prf, windowed_prf, EvalResult, DEFAULT_WINDOW};
use crate::outlier::{ForestConfig, IsoForest};
use crate::preprocess::{denoise_with, DenoiseConfig, RescaleParams};
use crate::rng::{self, tags};

pub use data::{ingest_csv, ingest_reader, DataSchema, Dataset, LABEL_COLUMN, TIMESTAMP_COLUMN};
pub use report::{
    AverageReport, DenoiseSummary, LatentStats, MeanMetrics, RepeatReport, RunReport, SweepReport,
    REPORT_FORMAT_VERSION,
};

/// Training rows for datasets without timestamps.
pub const DEFAULT_TRAIN_ROWS: usize = 320;
/// Training and test rows for time-indexed datasets.
pub const DEFAULT_SERIES_TRAIN_ROWS: usize = 640;
pub const DEFAULT_SERIES_TEST_ROWS: usize = 2000;
/// Circuit used when an HAE run names none.
pub const DEFAULT_CIRCUIT_ID: u32 = 10;

/// Row split. Unset fields take defaults that depend on whether the data
/// carries timestamps: time-indexed data is split in file order, other data
/// after a seeded shuffle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub train_rows: Option<usize>,
    /// Defaults to all remaining rows, or 2000 for time-indexed data.
    pub test_rows: Option<usize>,
    pub shuffle: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: PathBuf,
    pub schema: DataSchema,
    pub model: ModelKind,
    /// Registry circuit; required for the HAE and rejected otherwise.
    pub circuit_id: Option<u32>,
    pub circuit_seed: u64,
    /// Its `seed` field is replaced by the repeat seed.
    pub train: TrainConfig,
    pub denoise: bool,
    pub dbscan: DenoiseConfig,
    pub forest: ForestConfig,
    /// Timestep tolerance when the data has timestamps.
    pub window: u64,
    pub n_repeats: usize,
    /// Repeat `r` uses `seed + r` for initialization, shuffling and the forest.
    pub seed: u64,
    pub split: SplitConfig,
    pub descriptors: DescriptorConfig,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            data: PathBuf::new(),
            schema: DataSchema::default(),
            model: ModelKind::ClassicalAe,
            circuit_id: None,
            circuit_seed: 0,
            train: TrainConfig::default(),
            denoise: false,
            dbscan: DenoiseConfig::default(),
            forest: ForestConfig::default(),
            window: DEFAULT_WINDOW,
            n_repeats: 3,
            seed: 0,
            split: SplitConfig::default(),
            descriptors: DescriptorConfig::default(),
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        match (self.model, self.circuit_id) {
            (ModelKind::Hae, None) => return Err(Error::config("the HAE variant needs a circuit id")),
            (ModelKind::Hae, Some(id)) if !(1..=ZOO_SIZE).contains(&id) => {
                return Err(Error::config(format!("circuit id {id} outside 1..={ZOO_SIZE}")))
            }
            (ModelKind::ClassicalAe | ModelKind::ModifiedAe, Some(_)) => {
                return Err(Error::config("a circuit id is only valid for the HAE variant"))
            }
            _ => {}
        }
        if self.n_repeats == 0 {
            return Err(Error::config("n_repeats must be at least 1"));
        }
        self.train.validate()?;
        self.forest.validate()?;
        Ok(())
    }

    fn circuit(&self) -> Result<Option<CircuitSpec>> {
        self.circuit_id.map(|id| build_circuit(id, self.circuit_seed)).transpose()
    }
}

/// Everything needed to score new rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedPipeline {
    pub format_version: u32,
    pub rescale: RescaleParams,
    pub model: Model,
    pub forest: IsoForest,
    pub window: u64,
}

/// Scores of a dataset under a [`TrainedPipeline`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub latent: Vec<Vec<f64>>,
    pub scores: Vec<f64>,
    pub flags: Vec<bool>,
    pub reconstruction_loss: f64,
    /// Present when the data is labelled; windowed when it has timestamps.
    pub metrics: Option<EvalResult>,
}

impl TrainedPipeline {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text)?;
        if p.format_version != crate::autoencoder::MODEL_FORMAT_VERSION {
            return Err(Error::ModelFormat(format!("unsupported format version {}", p.format_version)));
        }
        p.model.verify()?;
        if p.forest.n_features != crate::autoencoder::LATENT_DIM || p.rescale.min.len() != p.model.n_features() {
            return Err(Error::ModelFormat("pipeline parts have inconsistent widths".into()));
        }
        Ok(p)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn evaluate(&self, data: &Dataset) -> Result<Evaluation> {
        if data.n_rows() == 0 {
            return Err(Error::Schema("no rows to evaluate".into()));
        }
        if data.features[0].len() != self.model.n_features() {
            return Err(Error::Schema(format!(
                "data has {} feature columns, model expects {}",
                data.features[0].len(),
                self.model.n_features()
            )));
        }
        let scaled = self.rescale.transform(&data.features)?;
        let latent = encode_latent(&self.model, &scaled)?;
        let scores = self.forest.scores(&latent)?;
        let flags: Vec<bool> = scores.iter().map(|&s| s > self.forest.score_threshold).collect();
        let reconstruction_loss = loss(&reconstruct(&self.model, &scaled)?, &scaled, LossKind::Mse)?;
        let metrics = match (&data.labels, &data.timestamps) {
            (Some(labels), Some(times)) => {
                let pick = |want: &dyn Fn(usize) -> bool| {
                    let mut t: Vec<i64> = (0..times.len()).filter(|&i| want(i)).map(|i| times[i]).collect();
                    t.sort_unstable();
                    t
                };
                Some(windowed_prf(&pick(&|i| flags[i]), &pick(&|i| labels[i]), self.window)?)
            }
            (Some(labels), None) => Some(prf(&flags, labels)?),
            (None, _) => None,
        };
        Ok(Evaluation { latent, scores, flags, reconstruction_loss, metrics })
    }
}

/// Train and test row indices, each ascending.
pub fn split_rows(dataset: &Dataset, split: &SplitConfig, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = dataset.n_rows();
    let series = dataset.timestamps.is_some();
    let n_train = split.train_rows.unwrap_or(if series { DEFAULT_SERIES_TRAIN_ROWS } else { DEFAULT_TRAIN_ROWS });
    if n_train == 0 || n <= n_train {
        return Err(Error::config(format!("dataset has {n} rows; a {n_train}-row training split needs more")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    if split.shuffle.unwrap_or(!series) {
        order.shuffle(&mut rng::tagged(seed, tags::SPLIT, 0));
    }
    let rest = n - n_train;
    let n_test = split.test_rows.unwrap_or(if series { DEFAULT_SERIES_TEST_ROWS } else { rest }).min(rest);
    if n_test == 0 {
        return Err(Error::config("test split is empty"));
    }
    let mut train_idx = order[..n_train].to_vec();
    let mut test_idx = order[n_train..n_train + n_test].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((train_idx, test_idx))
}

/// Reads `config.data` and runs [`run_on_dataset`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let dataset = ingest_csv(&config.data, &config.schema)?;
    run_on_dataset(config, &dataset)
}

pub fn run_on_dataset(config: &ExperimentConfig, dataset: &Dataset) -> Result<RunReport> {
    Ok(run_with_pipelines(config, dataset)?.0)
}

/// Full protocol, also returning the fitted pipeline of every repeat.
pub fn run_with_pipelines(config: &ExperimentConfig, dataset: &Dataset) -> Result<(RunReport, Vec<TrainedPipeline>)> {
    let started = Instant::now();
    config.validate()?;
    let circuit = config.circuit()?;
    let (train_idx, test_idx) = split_rows(dataset, &config.split, config.seed)?;
    let train_set = dataset.select(&train_idx);
    let test_set = dataset.select(&test_idx);

    let rescale = RescaleParams::fit(&train_set.features)?;
    let mut train_rows = rescale.transform(&train_set.features)?;
    let denoise = if config.denoise {
        let d = denoise_with(&train_rows, &config.dbscan)?;
        let summary =
            DenoiseSummary { eps: d.eps, min_samples: d.min_samples, removed: train_rows.len() - d.kept.len() };
        train_rows = d.data;
        Some(summary)
    } else {
        None
    };

    let runs: Vec<(RepeatReport, TrainedPipeline, Evaluation)> = (0..config.n_repeats)
        .into_par_iter()
        .map(|r| {
            let seed = config.seed.wrapping_add(r as u64);
            let model = Model::build(config.model, train_rows[0].len(), circuit.clone(), seed)?;
            let training = train(&model, &train_rows, &TrainConfig { seed, ..config.train })?;
            let train_latent = encode_latent(&training.model, &train_rows)?;
            let forest = IsoForest::fit(&train_latent, &config.forest, seed)?;
            let pipeline = TrainedPipeline {
                format_version: crate::autoencoder::MODEL_FORMAT_VERSION,
                rescale: rescale.clone(),
                model: training.model.clone(),
                forest,
                window: config.window,
            };
            let eval = pipeline.evaluate(&test_set)?;
            let report = RepeatReport {
                seed,
                initial_loss: training.initial_loss,
                final_loss: training.final_loss(),
                loss_history: training.loss_history,
                test_loss: eval.reconstruction_loss,
                score_threshold: pipeline.forest.score_threshold,
                n_flagged: eval.flags.iter().filter(|&&f| f).count(),
                metrics: eval.metrics,
                latent: LatentStats::of(&eval.latent),
            };
            Ok((report, pipeline, eval))
        })
        .collect::<Result<_>>()?;

    let descriptors = circuit.as_ref().map(|c| describe(c, &config.descriptors)).transpose()?;
    let repeats: Vec<RepeatReport> = runs.iter().map(|r| r.0.clone()).collect();
    let report = RunReport {
        format_version: REPORT_FORMAT_VERSION,
        model: config.model,
        circuit_id: config.circuit_id,
        config: config.clone(),
        n_features: dataset.features[0].len(),
        n_train: train_idx.len(),
        n_train_used: train_rows.len(),
        n_test: test_idx.len(),
        windowed: dataset.timestamps.is_some(),
        denoise,
        average: AverageReport::of(&repeats),
        repeats,
        descriptors,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    if let Some(dir) = &config.output_dir {
        write_run_outputs(dir, &report, &runs[0].2)?;
    }
    Ok((report, runs.into_iter().map(|r| r.1).collect()))
}

fn write_run_outputs(dir: &Path, report: &RunReport, first: &Evaluation) -> Result<()> {
    report::write_file(dir, "report.json", &report.to_json()?)?;
    report::write_file(dir, "report.txt", &report.to_text())?;
    let histories: Vec<Vec<f64>> = report.repeats.iter().map(|r| r.loss_history.clone()).collect();
    report::write_file(dir, "loss.svg", &svg::line_chart("training loss per epoch", &histories))?;
    let points: Vec<(f64, f64)> = first.latent.iter().map(|z| (z[0], z[1])).collect();
    report::write_file(dir, "latent.svg", &svg::scatter("test latent (dims 0, 1)", &points, &first.flags))?;
    if let Some(m) = report.average.metrics {
        let bars =
            vec![("precision".to_string(), m.precision), ("recall".to_string(), m.recall), ("f1".to_string(), m.f1)];
        report::write_file(dir, "metrics.svg", &svg::bar_chart("mean detection metrics", &bars))?;
    }
    Ok(())
}

/// HAE runs over several registry circuits plus the descriptor/metric
/// correlation table. Circuits flagged as non-convergent are run and
/// reported but left out of the correlations.
pub fn run_sweep(base: &ExperimentConfig, ids: &[u32]) -> Result<SweepReport> {
    let dataset = ingest_csv(&base.data, &base.schema)?;
    sweep_on_dataset(base, ids, &dataset)
}

pub fn sweep_on_dataset(base: &ExperimentConfig, ids: &[u32], dataset: &Dataset) -> Result<SweepReport> {
    if ids.is_empty() {
        return Err(Error::usage("sweep needs at least one circuit id"));
    }
    if let Some(bad) = ids.iter().find(|id| !(1..=ZOO_SIZE).contains(*id)) {
        return Err(Error::usage(format!("circuit id {bad} outside 1..={ZOO_SIZE}")));
    }
    if ids.iter().collect::<BTreeSet<_>>().len() != ids.len() {
        return Err(Error::usage("duplicate circuit ids in sweep"));
    }
    if dataset.labels.is_none() {
        return Err(Error::Schema("a sweep needs a label column to correlate against".into()));
    }
    let runs: Vec<RunReport> = ids
        .par_iter()
        .map(|&id| {
            let config = ExperimentConfig {
                model: ModelKind::Hae,
                circuit_id: Some(id),
                output_dir: base.output_dir.as_ref().map(|d| d.join(format!("circuit_{id:02}"))),
                ..base.clone()
            };
            run_on_dataset(&config, dataset)
        })
        .collect::<Result<_>>()?;
    let descriptors: Vec<_> = runs.iter().map(|r| r.descriptors.clone().expect("HAE run has descriptors")).collect();
    let outcomes: Vec<CircuitOutcome> = runs
        .iter()
        .zip(&descriptors)
        .map(|(r, d)| {
            let m = r.average.metrics.expect("labelled data");
            CircuitOutcome {
                descriptors: d.clone(),
                precision: m.precision,
                recall: m.recall,
                f1: m.f1,
                reconstruction_loss: r.average.final_loss,
            }
        })
        .collect();
    let correlations = correlation_table(&outcomes, CorrelationMethod::Pearson);
    let sweep = SweepReport { runs, descriptors, correlations };
    if let Some(dir) = &base.output_dir {
        report::write_file(dir, "sweep.json", &sweep.to_json()?)?;
        report::write_file(dir, "sweep.txt", &sweep.to_text())?;
        let bars: Vec<(String, f64)> = sweep
            .runs
            .iter()
            .map(|r| (r.circuit_id.unwrap_or(0).to_string(), r.average.metrics.map_or(0.0, |m| m.f1)))
            .collect();
        report::write_file(dir, "f1.svg", &svg::bar_chart("mean F1 per circuit", &bars))?;
    }
    Ok(sweep)
}
