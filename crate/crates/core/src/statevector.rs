//! Dense statevector simulation for small qubit registers.
//!
//! Qubit ordering is little-endian: qubit `k` is bit `k` of the basis index.
//! Rotations follow `R_a(φ) = exp(-i φ σ_a / 2)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 12;

const NORM_TOLERANCE: f64 = 1e-10;

/// Pauli rotation axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn unit(self) -> [f64; 3] {
        match self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
        }
    }
}

/// A concrete gate with all angles bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H {
        target: usize,
    },
    Rotation {
        axis: Axis,
        target: usize,
        angle: f64,
    },
    /// Rotation about an arbitrary unit axis.
    AxisRotation {
        axis: [f64; 3],
        target: usize,
        angle: f64,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    ControlledRotation {
        axis: Axis,
        control: usize,
        target: usize,
        angle: f64,
    },
}

impl Gate {
    pub fn h(target: usize) -> Self {
        Gate::H { target }
    }

    pub fn rx(target: usize, angle: f64) -> Self {
        Gate::Rotation { axis: Axis::X, target, angle }
    }

    pub fn ry(target: usize, angle: f64) -> Self {
        Gate::Rotation { axis: Axis::Y, target, angle }
    }

    pub fn rz(target: usize, angle: f64) -> Self {
        Gate::Rotation { axis: Axis::Z, target, angle }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn crx(control: usize, target: usize, angle: f64) -> Self {
        Gate::ControlledRotation { axis: Axis::X, control, target, angle }
    }

    pub fn cry(control: usize, target: usize, angle: f64) -> Self {
        Gate::ControlledRotation { axis: Axis::Y, control, target, angle }
    }

    pub fn crz(control: usize, target: usize, angle: f64) -> Self {
        Gate::ControlledRotation { axis: Axis::Z, control, target, angle }
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::H { target }
            | Gate::Rotation { target, .. }
            | Gate::AxisRotation { target, .. }
            | Gate::Cnot { target, .. }
            | Gate::ControlledRotation { target, .. } => target,
        }
    }

    pub fn control(&self) -> Option<usize> {
        match *self {
            Gate::Cnot { control, .. } | Gate::ControlledRotation { control, .. } => Some(control),
            _ => None,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.control().is_some()
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rotation { angle, .. }
            | Gate::AxisRotation { angle, .. }
            | Gate::ControlledRotation { angle, .. } => Some(angle),
            _ => None,
        }
    }

    /// Same gate with its rotation angle replaced. Non-rotation gates are
    /// returned unchanged.
    pub fn with_angle(&self, new_angle: f64) -> Self {
        let mut g = *self;
        match &mut g {
            Gate::Rotation { angle, .. }
            | Gate::AxisRotation { angle, .. }
            | Gate::ControlledRotation { angle, .. } => *angle = new_angle,
            _ => {}
        }
        g
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let target = self.target();
        if target >= n_qubits {
            return Err(Error::usage(format!("gate target {target} out of range for {n_qubits} qubits")));
        }
        if let Some(control) = self.control() {
            if control >= n_qubits {
                return Err(Error::usage(format!("gate control {control} out of range for {n_qubits} qubits")));
            }
            if control == target {
                return Err(Error::usage(format!("control and target are both qubit {target}")));
            }
        }
        if let Gate::AxisRotation { axis, .. } = self {
            let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::usage(format!("rotation axis has norm {norm}, expected 1")));
            }
        }
        if let Some(angle) = self.angle() {
            if !angle.is_finite() {
                return Err(Error::usage("non-finite rotation angle"));
            }
        }
        Ok(())
    }

    /// The 2x2 matrix acting on the target (conditionally, for controlled gates).
    pub fn target_matrix(&self) -> [[Complex64; 2]; 2] {
        match *self {
            Gate::H { .. } => {
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[s, s], [s, -s]]
            }
            Gate::Cnot { .. } => {
                let o = Complex64::new(0.0, 0.0);
                let l = Complex64::new(1.0, 0.0);
                [[o, l], [l, o]]
            }
            Gate::Rotation { axis, angle, .. } | Gate::ControlledRotation { axis, angle, .. } => {
                rotation_matrix(axis.unit(), angle)
            }
            Gate::AxisRotation { axis, angle, .. } => rotation_matrix(axis, angle),
        }
    }
}

/// `exp(-i φ n·σ / 2)` for a unit vector `n`.
pub fn rotation_matrix(n: [f64; 3], angle: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (angle / 2.0).sin_cos();
    let [nx, ny, nz] = n;
    [
        [Complex64::new(c, -s * nz), Complex64::new(-s * ny, -s * nx)],
        [Complex64::new(s * ny, -s * nx), Complex64::new(c, s * nz)],
    ]
}

/// Pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::config(format!("register size {n_qubits} outside 1..={MAX_QUBITS}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps explicit amplitudes. The length must be a power of two and the
    /// vector normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::usage(format!("amplitude count {len} is not a power of two >= 2")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::config(format!("register size {n_qubits} exceeds {MAX_QUBITS}")));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::usage("non-finite amplitude"));
        }
        let state = Self { n_qubits, amplitudes };
        let drift = (state.norm_sqr() - 1.0).abs();
        if drift > NORM_TOLERANCE {
            return Err(Error::usage(format!("state not normalized (|norm² - 1| = {drift:e})")));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `U|ψ⟩` as a new state.
    pub fn apply(&self, gate: &Gate) -> Result<Self> {
        let mut next = self.clone();
        next.apply_mut(gate)?;
        Ok(next)
    }

    pub fn apply_mut(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    /// Applies a gate already validated against this register size.
    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        let m = gate.target_matrix();
        let tbit = 1usize << gate.target();
        let cmask = gate.control().map_or(0, |c| 1usize << c);
        for i in 0..self.amplitudes.len() {
            if i & tbit != 0 || i & cmask != cmask {
                continue;
            }
            let j = i | tbit;
            let a = self.amplitudes[i];
            let b = self.amplitudes[j];
            self.amplitudes[i] = m[0][0] * a + m[0][1] * b;
            self.amplitudes[j] = m[1][0] * a + m[1][1] * b;
        }
    }

    /// `⟨Z_k⟩` for every qubit `k`.
    pub fn pauli_z_expectations(&self) -> Vec<f64> {
        let mut z = vec![0.0; self.n_qubits];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (k, zk) in z.iter_mut().enumerate() {
                if i >> k & 1 == 0 {
                    *zk += p;
                } else {
                    *zk -= p;
                }
            }
        }
        z
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::usage(format!("register size mismatch: {} vs {}", self.n_qubits, other.n_qubits)));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Single-qubit reduced density matrix of qubit `k`, as
    /// `[[ρ00, ρ01], [ρ10, ρ11]]`.
    pub fn reduced_density(&self, k: usize) -> Result<[[Complex64; 2]; 2]> {
        if k >= self.n_qubits {
            return Err(Error::usage(format!("qubit {k} out of range for {} qubits", self.n_qubits)));
        }
        let bit = 1usize << k;
        let mut rho00 = 0.0;
        let mut rho11 = 0.0;
        let mut rho01 = Complex64::new(0.0, 0.0);
        for i in 0..self.amplitudes.len() {
            if i & bit != 0 {
                continue;
            }
            let a0 = self.amplitudes[i];
            let a1 = self.amplitudes[i | bit];
            rho00 += a0.norm_sqr();
            rho11 += a1.norm_sqr();
            rho01 += a0 * a1.conj();
        }
        Ok([[Complex64::new(rho00, 0.0), rho01], [rho01.conj(), Complex64::new(rho11, 0.0)]])
    }

    /// `Tr[ρ_k²]` of the reduced state of qubit `k`.
    pub fn reduced_purity(&self, k: usize) -> Result<f64> {
        let rho = self.reduced_density(k)?;
        Ok(rho[0][0].re.powi(2) + rho[1][1].re.powi(2) + 2.0 * rho[0][1].norm_sqr())
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}
