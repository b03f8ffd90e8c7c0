//! Parametrized circuits: declarative specs, evaluation to Pauli-Z
//! expectations, and exact shift-rule Jacobians.

mod gradient;
mod zoo;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Gate, StateVector};

pub use gradient::{gradient_inputs, gradient_params, jacobians, Jacobians};
pub use zoo::{build_circuit, zoo_entry, zoo_records, ProcessingTemplate, ZooEntry, ZooRecord, ZOO_SIZE};

/// Gate-based data-loading strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EmbeddingKind {
    /// `R_x(x_q)` on every qubit.
    PauliX,
    /// `R_y(x_q)` on every qubit.
    PauliY,
    /// `R_x(x_0)` on qubit 0, then `CR_x(x_q)` controlled by `q - 1` for `q >= 1`.
    ControlledPauliX,
    /// `H` then `R_z(x_q)` on every qubit.
    HadamardPauliZ,
}

impl EmbeddingKind {
    pub fn name(self) -> &'static str {
        match self {
            EmbeddingKind::PauliX => "PauliX",
            EmbeddingKind::PauliY => "PauliY",
            EmbeddingKind::ControlledPauliX => "ControlledPauliX",
            EmbeddingKind::HadamardPauliZ => "HadamardPauliZ",
        }
    }

    fn gates(self, n_qubits: usize) -> Vec<GateTemplate> {
        let mut out = Vec::with_capacity(2 * n_qubits);
        for q in 0..n_qubits {
            match self {
                EmbeddingKind::PauliX => out.push(GateTemplate::input(Gate::rx(q, 0.0), q)),
                EmbeddingKind::PauliY => out.push(GateTemplate::input(Gate::ry(q, 0.0), q)),
                EmbeddingKind::ControlledPauliX if q == 0 => out.push(GateTemplate::input(Gate::rx(0, 0.0), 0)),
                EmbeddingKind::ControlledPauliX => out.push(GateTemplate::input(Gate::crx(q - 1, q, 0.0), q)),
                EmbeddingKind::HadamardPauliZ => {
                    out.push(GateTemplate::fixed(Gate::h(q)));
                    out.push(GateTemplate::input(Gate::rz(q, 0.0), q));
                }
            }
        }
        out
    }
}

/// Where a gate's rotation angle comes from at evaluation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngleSource {
    /// The angle stored in the gate (or no angle at all).
    Fixed,
    /// Trainable parameter slot `θ_j`.
    Param(usize),
    /// Input slot `x_q`.
    Input(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateTemplate {
    pub gate: Gate,
    pub source: AngleSource,
}

impl GateTemplate {
    pub fn fixed(gate: Gate) -> Self {
        Self { gate, source: AngleSource::Fixed }
    }

    pub fn param(gate: Gate, slot: usize) -> Self {
        Self { gate, source: AngleSource::Param(slot) }
    }

    pub fn input(gate: Gate, slot: usize) -> Self {
        Self { gate, source: AngleSource::Input(slot) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Layer {
    Embedding(EmbeddingKind),
    Processing(Vec<GateTemplate>),
}

/// A gate with its angle bound, remembering which slot fed the angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundGate {
    pub gate: Gate,
    pub source: AngleSource,
}

/// Declarative description of a parametrized circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    /// Registry id (1..=32) for zoo circuits, `None` for ad-hoc circuits.
    pub id: Option<u32>,
    /// Seed used to freeze random rotation axes.
    pub seed: u64,
    pub n_qubits: usize,
    pub layers: Vec<Layer>,
    pub n_params: usize,
    pub n_embedding_repetitions: usize,
    pub n_entangling_layers: usize,
    /// False for registry circuits known to fail training.
    pub convergent: bool,
}

impl CircuitSpec {
    /// Validates `layers` and derives the slot and layer counts.
    pub fn new(n_qubits: usize, layers: Vec<Layer>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::statevector::MAX_QUBITS {
            return Err(Error::config(format!("circuit register size {n_qubits} out of range")));
        }
        let mut slots = Vec::new();
        let mut n_embedding_repetitions = 0;
        let mut n_entangling_layers = 0;
        for layer in &layers {
            let gates = match layer {
                Layer::Embedding(kind) => {
                    n_embedding_repetitions += 1;
                    if *kind == EmbeddingKind::ControlledPauliX && n_qubits > 1 {
                        n_entangling_layers += 1;
                    }
                    kind.gates(n_qubits)
                }
                Layer::Processing(gates) => {
                    if gates.iter().any(|t| t.gate.is_two_qubit()) {
                        n_entangling_layers += 1;
                    }
                    gates.clone()
                }
            };
            for t in &gates {
                t.gate.validate(n_qubits)?;
                if t.source != AngleSource::Fixed && t.gate.angle().is_none() {
                    return Err(Error::UnsupportedGate(format!(
                        "{:?} carries a parameter or input slot but has no rotation angle",
                        t.gate
                    )));
                }
                match t.source {
                    AngleSource::Param(j) => slots.push(j),
                    AngleSource::Input(q) if q >= n_qubits => {
                        return Err(Error::usage(format!("input slot {q} out of range for {n_qubits} inputs")))
                    }
                    _ => {}
                }
            }
        }
        slots.sort_unstable();
        slots.dedup();
        if slots.iter().enumerate().any(|(i, &s)| i != s) {
            return Err(Error::usage("parameter slots must be contiguous from 0"));
        }
        Ok(Self {
            id: None,
            seed: 0,
            n_qubits,
            n_params: slots.len(),
            layers,
            n_embedding_repetitions,
            n_entangling_layers,
            convergent: true,
        })
    }

    /// Embedding family of the first embedding layer.
    pub fn embedding(&self) -> Option<EmbeddingKind> {
        self.layers.iter().find_map(|l| match l {
            Layer::Embedding(kind) => Some(*kind),
            Layer::Processing(_) => None,
        })
    }

    /// Flattened gate templates in application order.
    pub fn templates(&self) -> Vec<GateTemplate> {
        self.layers
            .iter()
            .flat_map(|l| match l {
                Layer::Embedding(kind) => kind.gates(self.n_qubits),
                Layer::Processing(gates) => gates.clone(),
            })
            .collect()
    }

    /// Number of gates whose angle is an input value, over all inputs.
    pub fn input_occurrences(&self) -> usize {
        self.templates().iter().filter(|t| matches!(t.source, AngleSource::Input(_))).count()
    }

    /// Spacing of the frequencies a univariate sweep can produce. Pauli
    /// rotations give integer frequencies; controlled rotations add half-integers.
    pub fn input_frequency_unit(&self) -> f64 {
        let controlled = self
            .templates()
            .iter()
            .any(|t| matches!(t.source, AngleSource::Input(_)) && matches!(t.gate, Gate::ControlledRotation { .. }));
        if controlled {
            0.5
        } else {
            1.0
        }
    }

    /// Binds `theta` and `x` into concrete gates.
    pub fn bind(&self, theta: &[f64], x: &[f64]) -> Result<Vec<BoundGate>> {
        if theta.len() != self.n_params {
            return Err(Error::usage(format!("expected {} parameters, got {}", self.n_params, theta.len())));
        }
        if x.len() != self.n_qubits {
            return Err(Error::usage(format!("expected {} inputs, got {}", self.n_qubits, x.len())));
        }
        Ok(self
            .templates()
            .into_iter()
            .map(|t| {
                let gate = match t.source {
                    AngleSource::Fixed => t.gate,
                    AngleSource::Param(j) => t.gate.with_angle(theta[j]),
                    AngleSource::Input(q) => t.gate.with_angle(x[q]),
                };
                BoundGate { gate, source: t.source }
            })
            .collect())
    }

    /// Final state `U(θ, x)|0…0⟩`.
    pub fn prepare_state(&self, theta: &[f64], x: &[f64]) -> Result<StateVector> {
        let mut state = StateVector::zero(self.n_qubits)?;
        for op in self.bind(theta, x)? {
            state.apply_unchecked(&op.gate);
        }
        Ok(state)
    }
}

/// Pauli-Z expectation of every qubit after running the circuit on `|0…0⟩`.
pub fn evaluate(spec: &CircuitSpec, theta: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    Ok(spec.prepare_state(theta, x)?.pauli_z_expectations())
}
