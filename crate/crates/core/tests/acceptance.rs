//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Set `HAE_MUSK_CSV` to a Musk CSV (header row, numeric features,
//! `label` column) to enable the dataset check in criterion 9.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::*;
use hae_core::autoencoder::{ModelKind, TrainConfig};
use hae_core::circuits::{build_circuit, jacobians, CircuitSpec, EmbeddingKind, GateTemplate, Layer, ZOO_SIZE};
use hae_core::descriptors::{
    fourier_sweep, kl_to_haar, meyer_wallach, sim_expressivity, DescriptorConfig, DESCRIPTOR_ROWS, GROUP_ALL,
    GROUP_PAULI_X, METRIC_COLUMNS,
};
use hae_core::experiment::{run_experiment, run_sweep, ExperimentConfig, RunReport, SplitConfig};
use hae_core::metrics::prf;
use hae_core::outlier::{build_tree, subsample, ForestConfig, IsoForest};
use hae_core::preprocess::{dbscan, DbscanConfig};
use hae_core::statevector::{Axis, Gate};
use hae_core::synth::{generate, SynthConfig};
use hae_core::{evaluate, fidelity, rng, StateVector};
use num_complex::Complex64;
use rand::Rng as _;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {:.2?}, limit {limit:?}", elapsed))
}

fn amps_close(s: &StateVector, want: &[Complex64], tol: f64) -> bool {
    s.amplitudes().iter().zip(want).all(|(a, b)| (a - b).norm() <= tol)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn simulator_exactness() -> Outcome {
    let start = Instant::now();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let h = StateVector::zero(1).unwrap().apply(&Gate::h(0)).unwrap();
    ensure(amps_close(&h, &[c(r, 0.0), c(r, 0.0)], 1e-12), || "H|0>".into())?;
    let x = StateVector::zero(1).unwrap().apply(&Gate::rx(0, PI)).unwrap();
    ensure(amps_close(&x, &[c(0.0, 0.0), c(0.0, -1.0)], 1e-12), || "RX(pi)|0>".into())?;
    // |q0 = 1, q1 = 0> is basis index 1; CNOT(0 -> 1) sends it to index 3.
    let one = StateVector::zero(2).unwrap().apply(&Gate::rx(0, PI)).unwrap();
    let flipped = one.apply(&Gate::cnot(0, 1)).unwrap();
    ensure(amps_close(&flipped, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)], 1e-12), || "CNOT".into())?;
    let bell = StateVector::zero(2).unwrap().apply(&Gate::h(0)).unwrap().apply(&Gate::cnot(0, 1)).unwrap();
    ensure(amps_close(&bell, &[c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)], 1e-12), || "Bell".into())?;

    let mut gen = rng::stream(2024, 0);
    let mut s = StateVector::zero(5).unwrap();
    for _ in 0..1000 {
        let t = gen.random_range(0..5);
        let other = (t + gen.random_range(1..5)) % 5;
        let angle = gen.random_range(-PI..PI);
        let axis = [Axis::X, Axis::Y, Axis::Z][gen.random_range(0..3)];
        let g = match gen.random_range(0..4) {
            0 => Gate::h(t),
            1 => Gate::Rotation { axis, target: t, angle },
            2 => Gate::cnot(other, t),
            _ => Gate::ControlledRotation { axis, control: other, target: t, angle },
        };
        s.apply_mut(&g).unwrap();
    }
    let drift = (s.norm_sqr() - 1.0).abs();
    ensure(drift <= 1e-10, || format!("norm drift {drift:e}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("fixtures within 1e-12, norm drift {drift:.1e} after 1000 gates"))
}

fn gradient_correctness() -> Outcome {
    let start = Instant::now();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for id in 1..=ZOO_SIZE {
        let spec = build_circuit(id, 0).unwrap();
        let mut gen = rng::stream(u64::from(id), 11);
        for _ in 0..10 {
            let theta: Vec<f64> = (0..spec.n_params).map(|_| gen.random_range(-PI..PI)).collect();
            let x: Vec<f64> = (0..spec.n_qubits).map(|_| gen.random_range(-1.0..1.0)).collect();
            let jac = jacobians(&spec, &theta, &x).map_err(|e| e.to_string())?;
            for j in 0..spec.n_params {
                let fd = central_difference(|t| evaluate(&spec, t, &x).unwrap(), &theta, j, h);
                for (row, fd_i) in jac.params.iter().zip(&fd) {
                    worst = worst.max((row[j] - fd_i).abs());
                }
            }
            for q in 0..spec.n_qubits {
                let fd = central_difference(|v| evaluate(&spec, &theta, v).unwrap(), &x, q, h);
                for (row, fd_i) in jac.inputs.iter().zip(&fd) {
                    worst = worst.max((row[q] - fd_i).abs());
                }
            }
        }
    }
    ensure(worst < 1e-6, || format!("max deviation {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("32 circuits x 10 draws, max |shift - FD| = {worst:.1e}"))
}

fn meyer_wallach_fixtures() -> Outcome {
    let product = [1, 2, 6, 8, 11, 14, 20, 27, 28, 30];
    let mut worst_product: f64 = 0.0;
    for id in product {
        worst_product = worst_product.max(meyer_wallach(&build_circuit(id, 0).unwrap(), 100, 1).unwrap().abs());
    }
    ensure(worst_product <= 1e-12, || format!("product circuit MW {worst_product:e}"))?;
    let mut gates = vec![GateTemplate::fixed(Gate::h(0))];
    gates.extend((0..3).map(|q| GateTemplate::fixed(Gate::cnot(q, q + 1))));
    let ghz = CircuitSpec::new(4, vec![Layer::Processing(gates)]).unwrap();
    let ghz_mw = meyer_wallach(&ghz, 1, 0).unwrap();
    ensure((ghz_mw - 1.0).abs() <= 1e-12, || format!("GHZ MW {ghz_mw}"))?;
    let mut gen = rng::stream(5, 5);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let s = random_state(4, &mut gen);
        worst = worst.max((hae_core::descriptors::meyer_wallach_state(&s) - meyer_wallach_oracle(&s)).abs());
    }
    ensure(worst <= 1e-12, || format!("oracle deviation {worst:e}"))?;
    Ok(format!("product circuits {worst_product:.0e}, GHZ {ghz_mw}, random-state oracle dev {worst:.1e}"))
}

fn expressivity_calibration() -> Outcome {
    let mut gen = rng::stream(77, 0);
    let fidelities: Vec<f64> =
        (0..1000).map(|_| fidelity(&random_state(4, &mut gen), &random_state(4, &mut gen)).unwrap()).collect();
    let haar_kl = kl_to_haar(&fidelities, 100, 16);
    ensure(haar_kl <= 0.15, || format!("Haar-sampled KL {haar_kl}"))?;
    let idle = CircuitSpec::new(4, vec![Layer::Processing(vec![])]).unwrap();
    let idle_kl = sim_expressivity(&idle, 1000, 100, 0).unwrap();
    ensure(idle_kl >= 60.0, || format!("idle KL {idle_kl}"))?;
    let mut slowest = Duration::ZERO;
    for id in 1..=ZOO_SIZE {
        let t = Instant::now();
        sim_expressivity(&build_circuit(id, 0).unwrap(), 1000, 100, 0).unwrap();
        slowest = slowest.max(t.elapsed());
    }
    within(slowest, Duration::from_secs(30))?;
    Ok(format!("Haar KL {haar_kl:.4}, idle KL {idle_kl:.2}, slowest circuit {slowest:.2?}"))
}

fn reuploading(r: usize) -> CircuitSpec {
    let mut layers = vec![Layer::Processing(vec![GateTemplate::param(Gate::rx(0, 0.0), 0)])];
    for k in 0..r {
        layers.push(Layer::Embedding(EmbeddingKind::PauliY));
        layers.push(Layer::Processing(vec![GateTemplate::param(Gate::rx(0, 0.0), k + 1)]));
    }
    CircuitSpec::new(1, layers).unwrap()
}

fn fourier_law() -> Outcome {
    let n = 64;
    let mut worst_parseval: f64 = 0.0;
    let mut gen = rng::stream(3, 3);
    for r in 1..=3 {
        let spec = reuploading(r);
        for _ in 0..5 {
            let theta: Vec<f64> = (0..spec.n_params).map(|_| gen.random_range(-PI..PI)).collect();
            let s = fourier_sweep(&spec, &theta, 0, n).unwrap();
            let support = s.positive_support();
            let want: Vec<usize> = (1..=r).collect();
            ensure(s.amplitudes[0] > s.threshold() && support == want, || {
                format!("r={r}: support {support:?}, A0 {}", s.amplitudes[0])
            })?;
            let mean_sq = (0..n)
                .map(|j| evaluate(&spec, &theta, &[2.0 * PI * j as f64 / n as f64]).unwrap()[0].powi(2))
                .sum::<f64>()
                / n as f64;
            let spectral = s.amplitudes[0].powi(2) / 4.0
                + s.amplitudes[1..n / 2].iter().map(|a| a * a / 2.0).sum::<f64>()
                + s.amplitudes[n / 2].powi(2);
            worst_parseval = worst_parseval.max((mean_sq - spectral).abs());
        }
    }
    ensure(worst_parseval <= 1e-8, || format!("Parseval gap {worst_parseval:e}"))?;
    Ok(format!("support = {{0..r}} for r = 1, 2, 3; Parseval gap {worst_parseval:.1e}"))
}

fn isolation_forest() -> Outcome {
    let start = Instant::now();
    let mut nodes = 0;
    for seed in 0..20u64 {
        let mut gen = rng::stream(seed, 21);
        let n = gen.random_range(2..=64);
        let data: Vec<Vec<f64>> = (0..n).map(|_| (0..4).map(|_| gen.random_range(-3.0..3.0)).collect()).collect();
        let limit = (n as f64).log2().ceil() as usize;
        let mut source = rng::stream(seed, 22);
        let mut rec = Recorder { inner: &mut source, tape: Vec::new() };
        let rows = subsample(n, n, &mut rec);
        let tree = build_tree(&data, &rows, limit, &mut rec);
        let mut replay = Replay::new(rec.tape);
        let reference = reference_tree(data, 0, limit, &mut replay);
        nodes += same_tree(&tree, &reference).map_err(|e| format!("instance {seed}: {e}"))?;
        ensure(replay.exhausted(), || format!("instance {seed}: unused draws"))?;
    }
    let mut f1s = Vec::new();
    for seed in 0..3 {
        let d = generate(&SynthConfig {
            n_features: 4,
            n_clusters: 2,
            n_inliers: 1000,
            outlier_fraction: 0.05,
            outlier_separation_sigma: 6.0,
            seed,
        })
        .unwrap();
        let forest =
            IsoForest::fit(&d.data, &ForestConfig { contamination: 0.05, ..Default::default() }, seed).unwrap();
        f1s.push(prf(&forest.predict(&d.data).unwrap(), &d.labels).unwrap().f1);
    }
    f1s.sort_by(f64::total_cmp);
    ensure(f1s[1] >= 0.9, || format!("median F1 {:.3} (runs {f1s:?})", f1s[1]))?;
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("{nodes} nodes agree with tape replay; planted-outlier F1 median {:.3}", f1s[1]))
}

fn dbscan_oracle_agreement() -> Outcome {
    let mut clusters = 0;
    let mut noise = 0;
    for seed in 0..10u64 {
        let mut gen = rng::stream(seed, 31);
        let (data, eps, min_samples) = clustered_instance(&mut gen);
        let got = dbscan(&data, &DbscanConfig { eps, min_samples }).unwrap();
        let want = dbscan_oracle(&data, eps, min_samples);
        ensure(canonical(&got) == canonical(&want), || format!("instance {seed} disagrees"))?;
        clusters += want.iter().copied().max().unwrap_or(-1) + 1;
        noise += want.iter().filter(|&&l| l < 0).count();
    }
    Ok(format!("10 x 200-point instances agree ({clusters} clusters, {noise} noise points in total)"))
}

fn smoke_config(
    dir: &std::path::Path,
    data: &std::path::Path,
    model: ModelKind,
    circuit: Option<u32>,
) -> ExperimentConfig {
    ExperimentConfig {
        data: data.to_path_buf(),
        model,
        circuit_id: circuit,
        output_dir: Some(dir.join(model.name())),
        ..Default::default()
    }
}

fn pipeline_smoke() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let csv = dir.path().join("synth.csv");
    let synth = generate(&SynthConfig::default()).unwrap();
    synth.write_csv(std::fs::File::create(&csv).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    for (model, circuit) in [(ModelKind::ClassicalAe, None), (ModelKind::Hae, Some(10))] {
        let cfg = smoke_config(dir.path(), &csv, model, circuit);
        let mut first = run_experiment(&cfg).map_err(|e| e.to_string())?;
        let mut second =
            run_experiment(&ExperimentConfig { output_dir: None, ..cfg.clone() }).map_err(|e| e.to_string())?;
        let text =
            std::fs::read_to_string(cfg.output_dir.as_ref().unwrap().join("report.json")).map_err(|e| e.to_string())?;
        let parsed = RunReport::from_json(&text).map_err(|e| e.to_string())?;
        ensure(parsed == first, || format!("{}: written report does not round-trip", model.name()))?;
        first.wall_clock_seconds = 0.0;
        second.wall_clock_seconds = 0.0;
        first.config.output_dir = None;
        ensure(first == second, || format!("{}: repeated run differs", model.name()))?;
        ensure(first.repeats.len() == 3, || "expected 3 repeats".into())?;
        let m = first.average.metrics.ok_or("missing metrics")?;
        ensure(m.f1.is_finite() && first.average.final_loss.is_finite(), || "non-finite metrics".into())?;
        if model == ModelKind::Hae {
            ensure(first.circuit_id == Some(10), || "circuit id not echoed".into())?;
            let bounded = first
                .repeats
                .iter()
                .all(|r| r.latent.min.iter().chain(&r.latent.max).all(|v| (-1.0..=1.0).contains(v)));
            ensure(bounded, || "HAE latent outside [-1, 1]".into())?;
        }
        lines.push(format!("{} F1 {:.3}", model.name(), m.f1));
    }
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(format!("{}; deterministic; {:.1?}", lines.join(", "), start.elapsed()))
}

fn musk_and_table_structure() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let csv = dir.path().join("synth.csv");
    let synth = generate(&SynthConfig { n_inliers: 400, seed: 9, ..Default::default() }).unwrap();
    synth.write_csv(std::fs::File::create(&csv).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let base = ExperimentConfig {
        data: csv,
        model: ModelKind::Hae,
        train: TrainConfig { epochs: 2, ..Default::default() },
        n_repeats: 1,
        split: SplitConfig { train_rows: Some(96), ..Default::default() },
        descriptors: DescriptorConfig {
            expressivity_samples: 100,
            meyer_wallach_samples: 50,
            fourier_param_samples: 2,
            fourier_points: 32,
            ..Default::default()
        },
        ..Default::default()
    };
    let ids = [1, 3, 7, 10, 14, 22, 27];
    let sweep = run_sweep(&base, &ids).map_err(|e| e.to_string())?;
    let blocks = &sweep.correlations;
    ensure(blocks.len() == 2 && blocks[0].grouping == GROUP_ALL && blocks[1].grouping == GROUP_PAULI_X, || {
        "grouping names".into()
    })?;
    ensure(blocks[0].circuit_ids == [1, 3, 10, 14, 22, 27], || {
        format!("all-converged ids {:?}", blocks[0].circuit_ids)
    })?;
    ensure(blocks[1].circuit_ids == [1, 3, 10], || format!("Pauli-X ids {:?}", blocks[1].circuit_ids))?;
    for b in blocks {
        let names: Vec<&str> = b.rows.iter().map(|r| r.descriptor.as_str()).collect();
        ensure(names == DESCRIPTOR_ROWS, || format!("row names {names:?}"))?;
        ensure(b.rows.iter().all(|r| r.values.len() == METRIC_COLUMNS.len()), || "column count".into())?;
    }
    let structure = "correlation table structure reproduced (7 rows x 4 metrics, 2 groupings, circuit 7 excluded)";

    let Ok(path) = std::env::var("HAE_MUSK_CSV") else {
        return Ok(format!("{structure}; Musk dataset not supplied (set HAE_MUSK_CSV), F1 check skipped"));
    };
    let musk = |model, circuit_id| {
        run_experiment(&ExperimentConfig { data: path.clone().into(), model, circuit_id, ..Default::default() })
            .map_err(|e| e.to_string())
    };
    let ae = musk(ModelKind::ClassicalAe, None)?;
    let ae_f1 = ae.average.metrics.ok_or("Musk file has no label column")?.f1;
    let hae = musk(ModelKind::Hae, Some(10))?;
    let hae_f1 = hae.average.metrics.ok_or("Musk file has no label column")?.f1;
    ensure((ae_f1 - 0.908).abs() <= 0.10, || format!("Musk AE F1 {ae_f1:.3} not within 0.10 of 0.908"))?;
    let direction = if hae_f1 > ae_f1 { "above" } else { "not above" };
    Ok(format!("{structure}; Musk AE F1 {ae_f1:.3} (target 0.908 +- 0.10), HAE-10 F1 {hae_f1:.3} ({direction} AE, reported only)"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("simulator exactness", simulator_exactness),
        ("gradient correctness", gradient_correctness),
        ("Meyer-Wallach fixtures", meyer_wallach_fixtures),
        ("Sim expressivity calibration", expressivity_calibration),
        ("Fourier spectrum law", fourier_law),
        ("Isolation Forest", isolation_forest),
        ("DBSCAN oracle", dbscan_oracle_agreement),
        ("pipeline smoke reproduction", pipeline_smoke),
        ("reference-number reproduction status", musk_and_table_structure),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
