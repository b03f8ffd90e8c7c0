//! Experiment configuration: an optional TOML file with command-line
//! overrides applied as dotted keys before deserialization.

use std::path::{Path, PathBuf};

use clap::Args;
use hae_core::autoencoder::{LossKind, ModelKind, Optimizer};
use hae_core::experiment::{ExperimentConfig, DEFAULT_CIRCUIT_ID};
use toml::{Table, Value};

use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct ExperimentArgs {
    /// TOML file with `ExperimentConfig` fields; flags take precedence.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// CSV with a header row, numeric features, optional `label` and `timestamp` columns.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub label_column: Option<String>,
    #[arg(long)]
    pub timestamp_column: Option<String>,
    #[arg(long, value_parser = parse_model)]
    pub model: Option<ModelKind>,
    /// Registry circuit for the HAE (defaults to 10).
    #[arg(long)]
    pub circuit: Option<u32>,
    #[arg(long)]
    pub circuit_seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long, value_parser = ["adam", "sgd"])]
    pub optimizer: Option<String>,
    #[arg(long, value_parser = ["mse", "rmse"])]
    pub loss: Option<String>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Remove DBSCAN noise points from the training split.
    #[arg(long)]
    pub denoise: bool,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub min_samples: Option<usize>,
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long)]
    pub subsample_size: Option<usize>,
    #[arg(long)]
    pub contamination: Option<f64>,
    /// Timestep tolerance for time-indexed data.
    #[arg(long)]
    pub window: Option<u64>,
    #[arg(long)]
    pub train_rows: Option<usize>,
    #[arg(long)]
    pub test_rows: Option<usize>,
    #[arg(long)]
    pub shuffle: Option<bool>,
    /// Directory for report.json, report.txt and SVG plots.
    #[arg(short, long)]
    pub output_dir: Option<PathBuf>,
    /// Any config field as `dotted.key=value`, value in TOML syntax.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse::<ModelKind>().map_err(|e| e.to_string())
}

fn path_value(p: &Path) -> Value {
    Value::String(p.to_string_lossy().into_owned())
}

impl ExperimentArgs {
    fn overrides(&self) -> Result<Vec<(String, Value)>, CliError> {
        let mut out: Vec<(String, Value)> = Vec::new();
        let mut put = |key: &str, v: Value| out.push((key.to_string(), v));
        let int = |n: u64| Value::Integer(n as i64);
        if let Some(p) = &self.data {
            put("data", path_value(p));
        }
        if let Some(s) = &self.label_column {
            put("schema.label_column", Value::String(s.clone()));
        }
        if let Some(s) = &self.timestamp_column {
            put("schema.timestamp_column", Value::String(s.clone()));
        }
        if let Some(m) = self.model {
            put("model", Value::String(m.name().into()));
        }
        if let Some(c) = self.circuit {
            put("circuit_id", int(c.into()));
        }
        if let Some(s) = self.circuit_seed {
            put("circuit_seed", int(s));
        }
        if let Some(e) = self.epochs {
            put("train.epochs", int(e as u64));
        }
        if let Some(b) = self.batch_size {
            put("train.batch_size", int(b as u64));
        }
        if let Some(lr) = self.learning_rate {
            put("train.learning_rate", Value::Float(lr));
        }
        if let Some(o) = &self.optimizer {
            let opt = if o == "sgd" { Optimizer::Sgd } else { Optimizer::default() };
            put("train.optimizer", Value::try_from(opt).map_err(|e| CliError::config(e.to_string()))?);
        }
        if let Some(l) = &self.loss {
            let kind = if l == "rmse" { LossKind::Rmse } else { LossKind::Mse };
            put("train.loss", Value::try_from(kind).map_err(|e| CliError::config(e.to_string()))?);
        }
        if let Some(r) = self.repeats {
            put("n_repeats", int(r as u64));
        }
        if let Some(s) = self.seed {
            put("seed", int(s));
        }
        if self.denoise {
            put("denoise", Value::Boolean(true));
        }
        if let Some(e) = self.eps {
            put("dbscan.eps", Value::Float(e));
        }
        if let Some(m) = self.min_samples {
            put("dbscan.min_samples", int(m as u64));
        }
        if let Some(t) = self.trees {
            put("forest.n_trees", int(t as u64));
        }
        if let Some(s) = self.subsample_size {
            put("forest.subsample_size", int(s as u64));
        }
        if let Some(c) = self.contamination {
            put("forest.contamination", Value::Float(c));
        }
        if let Some(w) = self.window {
            put("window", int(w));
        }
        if let Some(n) = self.train_rows {
            put("split.train_rows", int(n as u64));
        }
        if let Some(n) = self.test_rows {
            put("split.test_rows", int(n as u64));
        }
        if let Some(s) = self.shuffle {
            put("split.shuffle", Value::Boolean(s));
        }
        if let Some(d) = &self.output_dir {
            put("output_dir", path_value(d));
        }
        for s in &self.sets {
            out.push(parse_assignment(s)?);
        }
        Ok(out)
    }

    /// Merged configuration. An HAE run without a circuit gets the default one.
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut table = match &self.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
                text.parse::<Table>().map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
            }
            None => Table::new(),
        };
        for (key, value) in self.overrides()? {
            set_dotted(&mut table, &key, value)?;
        }
        let mut config: ExperimentConfig =
            Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::config(e.to_string()))?;
        if config.model == ModelKind::Hae && config.circuit_id.is_none() {
            config.circuit_id = Some(DEFAULT_CIRCUIT_ID);
        }
        if config.data.as_os_str().is_empty() {
            return Err(CliError::config("no dataset given (use --data or `data` in the config file)"));
        }
        config.validate()?;
        Ok(config)
    }
}

/// `a.b=value`, where the value is read as TOML and falls back to a bare string.
pub fn parse_assignment(s: &str) -> Result<(String, Value), CliError> {
    let (key, raw) =
        s.split_once('=').ok_or_else(|| CliError::config(format!("`{s}` is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(CliError::config(format!("bad key in `{s}`")));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    Ok((key.to_string(), value))
}

pub fn set_dotted(table: &mut Table, key: &str, value: Value) -> Result<(), CliError> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("split yields at least one part");
    let mut node = table;
    for part in parts {
        let entry = node.entry(part.to_string()).or_insert_with(|| Value::Table(Table::new()));
        node = entry.as_table_mut().ok_or_else(|| CliError::config(format!("`{part}` in `{key}` is not a table")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}
