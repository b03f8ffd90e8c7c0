//! Expressivity as the KL divergence between a circuit's sampled
//! pairwise-fidelity distribution and the Haar-random one.

use rand::Rng as _;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::circuits::CircuitSpec;
use crate::error::Result;
use crate::rng::{self, tags};
use crate::statevector::fidelity;

/// Haar pairwise-fidelity density `(d−1)(1−F)^(d−2)` in dimension `d`.
pub fn haar_fidelity_density(f: f64, dim: usize) -> f64 {
    let d = dim as f64;
    (d - 1.0) * (1.0 - f).powi(dim as i32 - 2)
}

/// Exact Haar probability mass of each of `n_bins` equal bins on `[0, 1]`.
///
/// The CDF is `1 − (1−F)^(d−1)`, so bin `[a, b)` has mass
/// `(1−a)^(d−1) − (1−b)^(d−1)`.
pub fn haar_bin_masses(n_bins: usize, dim: usize) -> Vec<f64> {
    let exponent = dim as i32 - 1;
    (0..n_bins)
        .map(|i| {
            let a = i as f64 / n_bins as f64;
            let b = (i + 1) as f64 / n_bins as f64;
            (1.0 - a).powi(exponent) - (1.0 - b).powi(exponent)
        })
        .collect()
}

/// Normalized histogram of fidelities over `n_bins` equal bins on `[0, 1]`.
/// `F = 1` lands in the last bin.
pub fn fidelity_histogram(fidelities: &[f64], n_bins: usize) -> Vec<f64> {
    let mut counts = vec![0usize; n_bins];
    for &f in fidelities {
        let bin = ((f.clamp(0.0, 1.0) * n_bins as f64) as usize).min(n_bins - 1);
        counts[bin] += 1;
    }
    let total = fidelities.len().max(1) as f64;
    counts.into_iter().map(|c| c as f64 / total).collect()
}

/// Discrete `KL(P_circuit || P_Haar)` in nats. Empty sample bins contribute 0.
pub fn kl_to_haar(fidelities: &[f64], n_bins: usize, dim: usize) -> f64 {
    let p = fidelity_histogram(fidelities, n_bins);
    let q = haar_bin_masses(n_bins, dim);
    p.iter().zip(&q).filter(|(pi, _)| **pi > 0.0).map(|(pi, qi)| pi * (pi / qi).ln()).sum::<f64>().max(0.0)
}

/// Fidelities of `n_samples` independent `(θ, x)`, `(θ′, x′)` pairs with
/// `θ ~ U[−π, π]` and `x ~ U[−1, 1]`.
pub fn sample_fidelities(spec: &CircuitSpec, n_samples: usize, seed: u64) -> Result<Vec<f64>> {
    (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::tagged(seed, tags::EXPRESSIVITY, i as u64);
            let (t1, x1) = draw_point(spec, &mut rng);
            let (t2, x2) = draw_point(spec, &mut rng);
            fidelity(&spec.prepare_state(&t1, &x1)?, &spec.prepare_state(&t2, &x2)?)
        })
        .collect()
}

pub(crate) fn draw_point(spec: &CircuitSpec, rng: &mut rng::Rng) -> (Vec<f64>, Vec<f64>) {
    let theta = (0..spec.n_params).map(|_| rng.random_range(-PI..PI)).collect();
    let x = (0..spec.n_qubits).map(|_| rng.random_range(-1.0..1.0)).collect();
    (theta, x)
}

/// Sim expressivity of a circuit with the embedding included.
pub fn sim_expressivity(spec: &CircuitSpec, n_samples: usize, n_bins: usize, seed: u64) -> Result<f64> {
    if n_bins == 0 {
        return Err(crate::Error::usage("histogram needs at least one bin"));
    }
    if n_samples < n_bins {
        log::warn!("expressivity estimate from {n_samples} samples over {n_bins} bins is degenerate");
    }
    let fidelities = sample_fidelities(spec, n_samples, seed)?;
    Ok(kl_to_haar(&fidelities, n_bins, 1 << spec.n_qubits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::Layer;

    #[test]
    fn haar_density_at_zero() {
        assert_eq!(haar_fidelity_density(0.0, 16), 15.0);
    }

    #[test]
    fn bin_masses_match_quadrature() {
        let masses = haar_bin_masses(100, 16);
        assert!((masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (i, m) in masses.iter().enumerate().step_by(7) {
            // Composite Simpson on the density.
            let (a, b) = (i as f64 / 100.0, (i + 1) as f64 / 100.0);
            let n = 2000;
            let h = (b - a) / n as f64;
            let mut s = haar_fidelity_density(a, 16) + haar_fidelity_density(b, 16);
            for k in 1..n {
                let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                s += w * haar_fidelity_density(a + k as f64 * h, 16);
            }
            let quad = s * h / 3.0;
            assert!((quad - m).abs() <= 1e-9 * m.max(1e-30) + 1e-40, "bin {i}: {quad} vs {m}");
        }
    }

    #[test]
    fn idle_circuit_kl_is_last_bin_surprisal() {
        let idle = CircuitSpec::new(4, vec![Layer::Processing(vec![])]).unwrap();
        let kl = sim_expressivity(&idle, 200, 100, 1).unwrap();
        // q_last = 0.01^15
        let expected = -(0.01f64.powi(15)).ln();
        assert!((kl - expected).abs() < 1e-9);
        assert!((kl - 69.0776).abs() < 1e-3);
    }
}
