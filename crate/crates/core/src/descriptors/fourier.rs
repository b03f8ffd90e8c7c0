//! Fourier analysis of univariate circuit models.
//!
//! A single scalar `x` drives every input slot and `⟨Z_q⟩` is sampled on one
//! period. The DFT is reported in amplitude/phase form
//! `f(x) = A_0/2 + Σ_ω A_ω cos(ω x − φ_ω)`.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng as _;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::circuits::{evaluate, CircuitSpec};
use crate::error::{Error, Result};
use crate::rng::{self, tags};

/// Relative amplitude threshold separating real support from round-off.
pub const RELATIVE_THRESHOLD: f64 = 1e-6;
/// Absolute floor so that an identically-zero signal has no support.
pub const ABSOLUTE_FLOOR: f64 = 1e-9;
/// Phase resolution used when counting distinct phases.
pub const PHASE_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSpectrum {
    /// `ω_k = k · unit` for `k = 0..=N/2`.
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<f64>,
    /// Cosine phases in `(−π, π]`; the constant term's phase is 0.
    pub phases: Vec<f64>,
}

impl FourierSpectrum {
    /// Amplitude/phase spectrum of `samples` taken at `x_j = P j / N` over
    /// one period `P = 2π / unit`.
    pub fn from_samples(samples: &[f64], unit: f64) -> Self {
        let n = samples.len();
        let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let half = n / 2;
        let mut frequencies = Vec::with_capacity(half + 1);
        let mut amplitudes = Vec::with_capacity(half + 1);
        let mut phases = Vec::with_capacity(half + 1);
        for (k, coeff) in buf.iter().enumerate().take(half + 1) {
            frequencies.push(k as f64 * unit);
            // The Nyquist bin of an even-length transform is not doubled.
            let nyquist = n.is_multiple_of(2) && k == half && k > 0;
            let scale = if nyquist { 1.0 } else { 2.0 };
            amplitudes.push(scale * coeff.norm() / n as f64);
            phases.push(if k == 0 { 0.0 } else { wrap_phase(-coeff.arg()) });
        }
        Self { frequencies, amplitudes, phases }
    }

    /// Largest amplitude over all frequencies, including the constant term.
    pub fn max_amplitude(&self) -> f64 {
        self.amplitudes.iter().cloned().fold(0.0, f64::max)
    }

    pub fn threshold(&self) -> f64 {
        (RELATIVE_THRESHOLD * self.max_amplitude()).max(ABSOLUTE_FLOOR)
    }

    /// Bin indices `k >= 1` with above-threshold amplitude.
    pub fn positive_support(&self) -> Vec<usize> {
        let t = self.threshold();
        (1..self.amplitudes.len()).filter(|&k| self.amplitudes[k] > t).collect()
    }
}

fn wrap_phase(phi: f64) -> f64 {
    if phi <= -PI {
        phi + 2.0 * PI
    } else if phi > PI {
        phi - 2.0 * PI
    } else {
        phi
    }
}

/// Spectrum of `⟨Z_qubit⟩` as a function of one scalar fed to all input slots.
pub fn fourier_sweep(spec: &CircuitSpec, theta: &[f64], qubit: usize, n_points: usize) -> Result<FourierSpectrum> {
    sweep_all_qubits(spec, theta, n_points)?
        .into_iter()
        .nth(qubit)
        .ok_or_else(|| Error::usage(format!("qubit {qubit} out of range")))
}

/// One spectrum per qubit from a single pass over the sweep grid.
pub fn sweep_all_qubits(spec: &CircuitSpec, theta: &[f64], n_points: usize) -> Result<Vec<FourierSpectrum>> {
    if n_points < 2 {
        return Err(Error::usage("a Fourier sweep needs at least two points"));
    }
    let unit = spec.input_frequency_unit();
    let period = 2.0 * PI / unit;
    let mut per_qubit = vec![Vec::with_capacity(n_points); spec.n_qubits];
    for j in 0..n_points {
        let x = period * j as f64 / n_points as f64;
        let z = evaluate(spec, theta, &vec![x; spec.n_qubits])?;
        for (series, zq) in per_qubit.iter_mut().zip(z) {
            series.push(zq);
        }
    }
    Ok(per_qubit.iter().map(|s| FourierSpectrum::from_samples(s, unit)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierDescriptors {
    pub n_positive_frequencies: usize,
    pub n_phases: usize,
    pub amplitude_variance: f64,
}

/// Frequency, phase and amplitude descriptors pooled over random `θ` draws
/// and all measured qubits.
pub fn fourier_descriptors(
    spec: &CircuitSpec,
    n_param_samples: usize,
    n_points: usize,
    seed: u64,
) -> Result<FourierDescriptors> {
    let mut support = BTreeSet::new();
    let mut phases = BTreeSet::new();
    let mut amplitudes = Vec::new();
    for draw in 0..n_param_samples {
        let mut rng = rng::tagged(seed, tags::FOURIER, draw as u64);
        let theta: Vec<f64> = (0..spec.n_params).map(|_| rng.random_range(-PI..PI)).collect();
        for spectrum in sweep_all_qubits(spec, &theta, n_points)? {
            for k in spectrum.positive_support() {
                support.insert(k);
                phases.insert((spectrum.phases[k] / PHASE_RESOLUTION).round() as i64);
                amplitudes.push(spectrum.amplitudes[k]);
            }
        }
    }
    let amplitude_variance = if amplitudes.is_empty() {
        0.0
    } else {
        let mean = amplitudes.iter().sum::<f64>() / amplitudes.len() as f64;
        amplitudes.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / amplitudes.len() as f64
    };
    Ok(FourierDescriptors { n_positive_frequencies: support.len(), n_phases: phases.len(), amplitude_variance })
}
