//! Registry of the 32 four-qubit benchmark circuits.
//!
//! Each circuit is `repetitions` blocks of `[embedding, processing]`, where
//! every block gets fresh trainable parameters. ID ranges fix the embedding
//! family: 1–13 Pauli-X, 14–21 Pauli-Y, 22–26 controlled Pauli-X and 27–32
//! Hadamard/Pauli-Z. Circuit 10 is circuit 3 repeated twice and circuit 13 is
//! circuit 3 repeated three times.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{CircuitSpec, EmbeddingKind, GateTemplate, Layer};
use crate::error::{Error, Result};
use crate::rng::{self, tags};
use crate::statevector::{Axis, Gate};

pub const ZOO_SIZE: u32 = 32;
const ZOO_QUBITS: usize = 4;

/// Processing block layouts used by the registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProcessingTemplate {
    /// One trainable rotation per qubit about a fixed axis.
    Rotations(Axis),
    /// One trainable rotation per qubit about a seeded random axis.
    RandomAxes,
    /// Rotation layer followed by a CNOT ring.
    RotationsCnotRing(Axis),
    /// Rotation layer followed by a chain of trainable CRX gates.
    RotationsCrxChain(Axis),
    /// Two rotation layers followed by a CNOT ring.
    DoubleRotationsCnotRing(Axis, Axis),
}

impl ProcessingTemplate {
    fn name(self) -> String {
        match self {
            ProcessingTemplate::Rotations(a) => format!("R{a:?}"),
            ProcessingTemplate::RandomAxes => "R*".into(),
            ProcessingTemplate::RotationsCnotRing(a) => format!("R{a:?}+CNOT-ring"),
            ProcessingTemplate::RotationsCrxChain(a) => format!("R{a:?}+CRX-chain"),
            ProcessingTemplate::DoubleRotationsCnotRing(a, b) => {
                format!("R{a:?}+R{b:?}+CNOT-ring")
            }
        }
    }

    /// Gates of one block, with parameter slots starting at `offset`.
    fn gates(self, n: usize, offset: usize, rng: &mut rng::Rng) -> Vec<GateTemplate> {
        let mut block = Block { out: Vec::new(), slot: offset, n };
        match self {
            ProcessingTemplate::Rotations(a) => block.rotations(a),
            ProcessingTemplate::RandomAxes => {
                for q in 0..n {
                    let axis = random_axis(rng);
                    block.param(Gate::AxisRotation { axis, target: q, angle: 0.0 });
                }
            }
            ProcessingTemplate::RotationsCnotRing(a) => {
                block.rotations(a);
                block.cnot_ring();
            }
            ProcessingTemplate::RotationsCrxChain(a) => {
                block.rotations(a);
                for q in 0..n - 1 {
                    block.param(Gate::crx(q, q + 1, 0.0));
                }
            }
            ProcessingTemplate::DoubleRotationsCnotRing(a, b) => {
                block.rotations(a);
                block.rotations(b);
                block.cnot_ring();
            }
        }
        block.out
    }
}

struct Block {
    out: Vec<GateTemplate>,
    slot: usize,
    n: usize,
}

impl Block {
    fn param(&mut self, gate: Gate) {
        self.out.push(GateTemplate::param(gate, self.slot));
        self.slot += 1;
    }

    fn rotations(&mut self, axis: Axis) {
        for q in 0..self.n {
            self.param(Gate::Rotation { axis, target: q, angle: 0.0 });
        }
    }

    fn cnot_ring(&mut self) {
        for q in 0..self.n {
            self.out.push(GateTemplate::fixed(Gate::cnot(q, (q + 1) % self.n)));
        }
    }
}

fn random_axis(rng: &mut rng::Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [StandardNormal.sample(rng), StandardNormal.sample(rng), StandardNormal.sample(rng)];
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.map(|c| c / norm);
        }
    }
}

/// Structural description of one registry circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZooEntry {
    pub id: u32,
    pub embedding: EmbeddingKind,
    pub repetitions: usize,
    pub template: ProcessingTemplate,
    pub convergent: bool,
}

/// One line of the registry dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZooRecord {
    pub id: u32,
    pub embedding: String,
    pub repetitions: usize,
    pub processing: String,
    pub n_params: usize,
    pub n_entangling_layers: usize,
    pub convergent: bool,
}

pub fn zoo_entry(id: u32) -> Option<ZooEntry> {
    use Axis::{X, Y, Z};
    use EmbeddingKind::*;
    use ProcessingTemplate::*;
    let (embedding, repetitions, template) = match id {
        1 => (PauliX, 1, Rotations(Y)),
        2 => (PauliX, 1, RandomAxes),
        3 => (PauliX, 1, RotationsCnotRing(Y)),
        4 => (PauliX, 1, RotationsCrxChain(Y)),
        5 => (PauliX, 1, DoubleRotationsCnotRing(Y, Z)),
        6 => (PauliX, 2, Rotations(Y)),
        7 => (PauliX, 2, RotationsCrxChain(X)),
        8 => (PauliX, 2, RandomAxes),
        9 => (PauliX, 2, DoubleRotationsCnotRing(Z, Y)),
        10 => (PauliX, 2, RotationsCnotRing(Y)),
        11 => (PauliX, 3, Rotations(Y)),
        12 => (PauliX, 3, RotationsCrxChain(Y)),
        13 => (PauliX, 3, RotationsCnotRing(Y)),
        14 => (PauliY, 1, Rotations(X)),
        15 => (PauliY, 1, DoubleRotationsCnotRing(X, Z)),
        16 => (PauliY, 1, RotationsCnotRing(X)),
        17 => (PauliY, 1, RotationsCrxChain(X)),
        18 => (PauliY, 2, DoubleRotationsCnotRing(X, Z)),
        19 => (PauliY, 2, RotationsCnotRing(X)),
        20 => (PauliY, 2, RandomAxes),
        21 => (PauliY, 3, RotationsCnotRing(X)),
        22 => (ControlledPauliX, 1, Rotations(Y)),
        23 => (ControlledPauliX, 1, RotationsCnotRing(Y)),
        24 => (ControlledPauliX, 2, Rotations(Y)),
        25 => (ControlledPauliX, 2, RotationsCrxChain(Y)),
        26 => (ControlledPauliX, 2, RandomAxes),
        27 => (HadamardPauliZ, 1, Rotations(X)),
        28 => (HadamardPauliZ, 1, RandomAxes),
        29 => (HadamardPauliZ, 1, RotationsCnotRing(Y)),
        30 => (HadamardPauliZ, 2, Rotations(X)),
        31 => (HadamardPauliZ, 2, RotationsCrxChain(X)),
        32 => (HadamardPauliZ, 3, DoubleRotationsCnotRing(X, Y)),
        _ => return None,
    };
    Some(ZooEntry { id, embedding, repetitions, template, convergent: !matches!(id, 7 | 15 | 18 | 25) })
}

/// Deterministic registry circuit for `(id, seed)`.
pub fn build_circuit(id: u32, seed: u64) -> Result<CircuitSpec> {
    let entry = zoo_entry(id)
        .ok_or_else(|| Error::usage(format!("unknown circuit id {id} (registry holds 1..={ZOO_SIZE})")))?;
    let mut rng = rng::tagged(seed, tags::ZOO_AXES, u64::from(id));
    let mut layers = Vec::with_capacity(2 * entry.repetitions);
    let mut offset = 0;
    for _ in 0..entry.repetitions {
        layers.push(Layer::Embedding(entry.embedding));
        let gates = entry.template.gates(ZOO_QUBITS, offset, &mut rng);
        offset += gates.iter().filter(|t| matches!(t.source, super::AngleSource::Param(_))).count();
        layers.push(Layer::Processing(gates));
    }
    let mut spec = CircuitSpec::new(ZOO_QUBITS, layers)?;
    spec.id = Some(id);
    spec.seed = seed;
    spec.convergent = entry.convergent;
    Ok(spec)
}

/// Registry dump, one record per circuit.
pub fn zoo_records(seed: u64) -> Result<Vec<ZooRecord>> {
    (1..=ZOO_SIZE)
        .map(|id| {
            let entry = zoo_entry(id).expect("registry id");
            let spec = build_circuit(id, seed)?;
            Ok(ZooRecord {
                id,
                embedding: entry.embedding.name().into(),
                repetitions: entry.repetitions,
                processing: entry.template.name(),
                n_params: spec.n_params,
                n_entangling_layers: spec.n_entangling_layers,
                convergent: entry.convergent,
            })
        })
        .collect()
}
