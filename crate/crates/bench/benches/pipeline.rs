use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use hae_bench::{angles, synthetic_rows};
use hae_core::autoencoder::{Model, ModelKind, TrainConfig};
use hae_core::circuits::{build_circuit, jacobians};
use hae_core::descriptors::{meyer_wallach, sim_expressivity};
use hae_core::preprocess::{dbscan, rescale_fit_transform, DbscanConfig};
use hae_core::{evaluate, train, ForestConfig, Gate, IsoForest, StateVector};

fn statevector(c: &mut Criterion) {
    let gates: Vec<Gate> =
        (0..12).flat_map(|q| [Gate::h(q), Gate::ry(q, 0.3 * q as f64), Gate::crz(q, (q + 1) % 12, 0.1)]).collect();
    c.bench_function("statevector/12q_36_gates", |b| {
        b.iter_batched_ref(
            || StateVector::zero(12).unwrap(),
            |s| {
                for g in &gates {
                    s.apply_mut(g).unwrap();
                }
            },
            BatchSize::SmallInput,
        )
    });
}

fn circuits(c: &mut Criterion) {
    let mut group = c.benchmark_group("circuits");
    for id in [1, 10, 25] {
        let spec = build_circuit(id, 0).unwrap();
        let theta = angles(spec.n_params, 0.0);
        let x = angles(spec.n_qubits, 3.0);
        group.bench_function(format!("evaluate/{id}"), |b| b.iter(|| evaluate(&spec, black_box(&theta), &x).unwrap()));
        group
            .bench_function(format!("jacobians/{id}"), |b| b.iter(|| jacobians(&spec, black_box(&theta), &x).unwrap()));
    }
    group.finish();
}

fn descriptors(c: &mut Criterion) {
    let mut group = c.benchmark_group("descriptors");
    group.sample_size(10);
    let spec = build_circuit(10, 0).unwrap();
    group.bench_function("sim_expressivity/10", |b| b.iter(|| sim_expressivity(&spec, 1000, 100, 0).unwrap()));
    group.bench_function("meyer_wallach/10", |b| b.iter(|| meyer_wallach(&spec, 1000, 0).unwrap()));
    group.finish();
}

fn training(c: &mut Criterion) {
    let (_, rows) = rescale_fit_transform(&synthetic_rows(8, 305, 1)).unwrap();
    let config = TrainConfig { epochs: 1, ..Default::default() };
    let mut group = c.benchmark_group("train_epoch");
    group.sample_size(10);
    for (kind, circuit) in [(ModelKind::ClassicalAe, None), (ModelKind::Hae, Some(10))] {
        let model = Model::build(kind, 8, circuit.map(|id| build_circuit(id, 0).unwrap()), 0).unwrap();
        group.bench_function(kind.name(), |b| b.iter(|| train(&model, &rows, &config).unwrap()));
    }
    group.finish();
}

fn detection(c: &mut Criterion) {
    let rows = synthetic_rows(4, 1000, 2);
    c.bench_function("isolation_forest/fit_1050x4", |b| {
        b.iter(|| IsoForest::fit(black_box(&rows), &ForestConfig::default(), 0).unwrap())
    });
    let small = synthetic_rows(4, 400, 3);
    c.bench_function("dbscan/420x4", |b| {
        b.iter(|| dbscan(black_box(&small), &DbscanConfig { eps: 1.5, min_samples: 5 }).unwrap())
    });
}

criterion_group!(benches, statevector, circuits, descriptors, training, detection);
criterion_main!(benches);
