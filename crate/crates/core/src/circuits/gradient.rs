//! Exact circuit derivatives via parameter-shift rules.
//!
//! Every trainable or input-fed angle enters a rotation gate, so each
//! occurrence is differentiated by shifting only that gate's angle:
//!
//! * single-qubit rotations (generator eigenvalues ±1/2) use the two-term
//!   rule `½[f(φ+π/2) − f(φ−π/2)]`;
//! * controlled rotations (eigenvalues 0, ±1/2) use the four-term rule with
//!   shifts π/2 and 3π/2.
//!
//! A slot used by several gates receives the sum of its per-occurrence terms.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use super::{AngleSource, BoundGate, CircuitSpec};
use crate::error::{Error, Result};
use crate::statevector::{Gate, StateVector};

/// Expectations and both Jacobians at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobians {
    pub value: Vec<f64>,
    /// `params[i][j] = ∂⟨Z_i⟩/∂θ_j`.
    pub params: Vec<Vec<f64>>,
    /// `inputs[i][q] = ∂⟨Z_i⟩/∂x_q`.
    pub inputs: Vec<Vec<f64>>,
}

#[derive(Clone, Copy)]
enum Wrt {
    Params,
    Inputs,
    Both,
}

struct Shifted<'a> {
    ops: &'a [BoundGate],
    prefix: Vec<StateVector>,
}

impl<'a> Shifted<'a> {
    fn new(n_qubits: usize, ops: &'a [BoundGate]) -> Result<Self> {
        let mut prefix = Vec::with_capacity(ops.len() + 1);
        let mut state = StateVector::zero(n_qubits)?;
        prefix.push(state.clone());
        for op in ops {
            state.apply_unchecked(&op.gate);
            prefix.push(state.clone());
        }
        Ok(Self { ops, prefix })
    }

    fn value(&self) -> Vec<f64> {
        self.prefix[self.ops.len()].pauli_z_expectations()
    }

    /// Expectations with the angle of gate `at` moved by `delta`.
    fn shifted(&self, at: usize, delta: f64) -> Vec<f64> {
        let mut state = self.prefix[at].clone();
        let gate = self.ops[at].gate;
        let angle = gate.angle().expect("shifted gate has an angle");
        state.apply_unchecked(&gate.with_angle(angle + delta));
        for op in &self.ops[at + 1..] {
            state.apply_unchecked(&op.gate);
        }
        state.pauli_z_expectations()
    }

    /// `∂⟨Z⟩/∂φ` for the angle of gate `at`.
    fn derivative(&self, at: usize) -> Result<Vec<f64>> {
        match self.ops[at].gate {
            Gate::Rotation { .. } | Gate::AxisRotation { .. } => {
                let plus = self.shifted(at, FRAC_PI_2);
                let minus = self.shifted(at, -FRAC_PI_2);
                Ok(plus.iter().zip(&minus).map(|(p, m)| 0.5 * (p - m)).collect())
            }
            Gate::ControlledRotation { .. } => {
                let near = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
                let far = (SQRT_2 - 1.0) / (4.0 * SQRT_2);
                let p1 = self.shifted(at, FRAC_PI_2);
                let m1 = self.shifted(at, -FRAC_PI_2);
                let p3 = self.shifted(at, 3.0 * FRAC_PI_2);
                let m3 = self.shifted(at, -3.0 * FRAC_PI_2);
                Ok((0..p1.len()).map(|i| near * (p1[i] - m1[i]) - far * (p3[i] - m3[i])).collect())
            }
            other => Err(Error::UnsupportedGate(format!("{other:?}"))),
        }
    }
}

fn compute(spec: &CircuitSpec, theta: &[f64], x: &[f64], wrt: Wrt) -> Result<Jacobians> {
    let ops = spec.bind(theta, x)?;
    let sim = Shifted::new(spec.n_qubits, &ops)?;
    let n = spec.n_qubits;
    let mut params = vec![vec![0.0; spec.n_params]; n];
    let mut inputs = vec![vec![0.0; n]; n];
    for (at, op) in ops.iter().enumerate() {
        let (column, target) = match (op.source, wrt) {
            (AngleSource::Param(j), Wrt::Params | Wrt::Both) => (j, &mut params),
            (AngleSource::Input(q), Wrt::Inputs | Wrt::Both) => (q, &mut inputs),
            _ => continue,
        };
        let d = sim.derivative(at)?;
        for (row, di) in target.iter_mut().zip(d) {
            row[column] += di;
        }
    }
    Ok(Jacobians { value: sim.value(), params, inputs })
}

/// Expectations plus Jacobians with respect to both `θ` and `x`.
pub fn jacobians(spec: &CircuitSpec, theta: &[f64], x: &[f64]) -> Result<Jacobians> {
    compute(spec, theta, x, Wrt::Both)
}

/// `n_qubits × n_params` Jacobian `∂⟨Z_i⟩/∂θ_j`.
pub fn gradient_params(spec: &CircuitSpec, theta: &[f64], x: &[f64]) -> Result<Vec<Vec<f64>>> {
    Ok(compute(spec, theta, x, Wrt::Params)?.params)
}

/// `n_qubits × n_qubits` Jacobian `∂⟨Z_i⟩/∂x_q`.
pub fn gradient_inputs(spec: &CircuitSpec, theta: &[f64], x: &[f64]) -> Result<Vec<Vec<f64>>> {
    Ok(compute(spec, theta, x, Wrt::Inputs)?.inputs)
}
