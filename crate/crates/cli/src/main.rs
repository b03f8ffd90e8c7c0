//! `hae`: synthetic data, training runs, scoring, circuit descriptors and
//! circuit sweeps for autoencoder-based anomaly detection.

mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hae_core::circuits::{build_circuit, zoo_records, ZOO_SIZE};
use hae_core::experiment::{ingest_csv, run_sweep, run_with_pipelines, DataSchema, TrainedPipeline};
use hae_core::{describe, generate, DescriptorConfig, SynthConfig};

use config::ExperimentArgs;

/// Failure with its process exit code: 1 usage/config, 2 data, 3 divergence.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn io(context: &str, e: io::Error) -> Self {
        Self { code: 2, message: format!("{context}: {e}") }
    }
}

impl From<hae_core::Error> for CliError {
    fn from(e: hae_core::Error) -> Self {
        Self { code: e.exit_code() as u8, message: e.to_string() }
    }
}

type CliResult = Result<(), CliError>;

#[derive(Debug, Parser)]
#[command(name = "hae", version, about = "Hybrid quantum-classical autoencoder anomaly detection")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a labelled synthetic clustered dataset as CSV.
    Synth(SynthArgs),
    /// Run the train/encode/detect protocol and write reports.
    Train(TrainArgs),
    /// Score a CSV with a saved pipeline.
    Evaluate(EvaluateArgs),
    /// Expressivity, entanglement and Fourier descriptors of registry circuits.
    Descriptors(DescriptorArgs),
    /// HAE runs over several circuits plus descriptor/metric correlations.
    Sweep(SweepArgs),
    /// Circuit registry.
    Zoo {
        #[command(subcommand)]
        command: ZooCommand,
    },
}

#[derive(Debug, Subcommand)]
enum ZooCommand {
    /// One JSON object per registry circuit.
    List {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Output CSV; standard output if omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    features: usize,
    #[arg(long, default_value_t = 3)]
    clusters: usize,
    #[arg(long, default_value_t = 1000)]
    inliers: usize,
    #[arg(long, default_value_t = 0.05)]
    outlier_fraction: f64,
    /// Minimum outlier distance from every cluster center, in standard deviations.
    #[arg(long, default_value_t = 6.0)]
    separation: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Save the first repeat's fitted pipeline for `hae evaluate`.
    #[arg(long)]
    save_model: Option<PathBuf>,
    /// Print the report as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Pipeline file written by `hae train --save-model`.
    #[arg(short, long)]
    pipeline: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long)]
    timestamp_column: Option<String>,
    /// Per-row scores and flags as CSV.
    #[arg(long)]
    scores: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DescriptorArgs {
    /// Circuit ids; all registry circuits if omitted.
    #[arg(long, value_delimiter = ',')]
    circuits: Vec<u32>,
    #[arg(long, default_value_t = 0)]
    circuit_seed: u64,
    #[arg(long, default_value_t = 1000)]
    expressivity_samples: usize,
    #[arg(long, default_value_t = 100)]
    bins: usize,
    #[arg(long, default_value_t = 1000)]
    mw_samples: usize,
    #[arg(long, default_value_t = 10)]
    fourier_params: usize,
    #[arg(long, default_value_t = 64)]
    fourier_points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Circuit ids; all registry circuits if omitted.
    #[arg(long, value_delimiter = ',')]
    ids: Vec<u32>,
    #[arg(long)]
    json: bool,
}

fn write_line(out: &mut impl Write, line: &str) -> CliResult {
    writeln!(out, "{line}").map_err(|e| CliError::io("stdout", e))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string(value).map_err(|e| CliError { code: 2, message: e.to_string() })
}

fn synth(args: &SynthArgs) -> CliResult {
    let data = generate(&SynthConfig {
        n_features: args.features,
        n_clusters: args.clusters,
        n_inliers: args.inliers,
        outlier_fraction: args.outlier_fraction,
        outlier_separation_sigma: args.separation,
        seed: args.seed,
    })?;
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(&path.display().to_string(), e))?;
            data.write_csv(BufWriter::new(file))?;
            log::info!("wrote {} rows to {}", data.data.len(), path.display());
        }
        None => data.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn train(args: &TrainArgs) -> CliResult {
    let config = args.experiment.resolve()?;
    let dataset = ingest_csv(&config.data, &config.schema)?;
    let (report, pipelines) = run_with_pipelines(&config, &dataset)?;
    if let Some(path) = &args.save_model {
        pipelines[0].save(path)?;
    }
    let text = if args.json { report.to_json()? } else { report.to_text() };
    write_line(&mut io::stdout().lock(), text.trim_end())
}

fn evaluate(args: &EvaluateArgs) -> CliResult {
    let pipeline = TrainedPipeline::load(&args.pipeline)?;
    let schema =
        DataSchema { label_column: args.label_column.clone(), timestamp_column: args.timestamp_column.clone() };
    let dataset = ingest_csv(&args.data, &schema)?;
    let eval = pipeline.evaluate(&dataset)?;
    if let Some(path) = &args.scores {
        let file = File::create(path).map_err(|e| CliError::io(&path.display().to_string(), e))?;
        let mut w = BufWriter::new(file);
        let mut rows = String::from("row,score,flag\n");
        for (i, (s, f)) in eval.scores.iter().zip(&eval.flags).enumerate() {
            rows.push_str(&format!("{i},{s},{}\n", u8::from(*f)));
        }
        w.write_all(rows.as_bytes()).map_err(|e| CliError::io(&path.display().to_string(), e))?;
    }
    let summary = serde_json::json!({
        "n_rows": eval.scores.len(),
        "n_flagged": eval.flags.iter().filter(|&&f| f).count(),
        "reconstruction_loss": eval.reconstruction_loss,
        "metrics": eval.metrics,
    });
    write_line(&mut io::stdout().lock(), &summary.to_string())
}

fn descriptors(args: &DescriptorArgs) -> CliResult {
    let ids: Vec<u32> = if args.circuits.is_empty() { (1..=ZOO_SIZE).collect() } else { args.circuits.clone() };
    let config = DescriptorConfig {
        expressivity_samples: args.expressivity_samples,
        expressivity_bins: args.bins,
        meyer_wallach_samples: args.mw_samples,
        fourier_param_samples: args.fourier_params,
        fourier_points: args.fourier_points,
        seed: args.seed,
    };
    let mut out = io::stdout().lock();
    for id in ids {
        let spec = build_circuit(id, args.circuit_seed)?;
        write_line(&mut out, &to_json(&describe(&spec, &config)?)?)?;
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> CliResult {
    let experiment = ExperimentArgs { model: Some(hae_core::ModelKind::Hae), ..args.experiment.clone() };
    let config = experiment.resolve()?;
    let ids: Vec<u32> = if args.ids.is_empty() { (1..=ZOO_SIZE).collect() } else { args.ids.clone() };
    let report = run_sweep(&config, &ids)?;
    let text = if args.json { report.to_json()? } else { report.to_text() };
    write_line(&mut io::stdout().lock(), text.trim_end())
}

fn zoo_list(seed: u64) -> CliResult {
    let mut out = io::stdout().lock();
    for record in zoo_records(seed)? {
        write_line(&mut out, &to_json(&record)?)?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Train(a) => train(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Descriptors(a) => descriptors(a),
        Command::Sweep(a) => sweep(a),
        Command::Zoo { command: ZooCommand::List { seed } } => zoo_list(*seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
