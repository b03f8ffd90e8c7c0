//! Meyer-Wallach entangling capability via single-qubit purities.

use rayon::prelude::*;

use super::expressivity::draw_point;
use crate::circuits::CircuitSpec;
use crate::error::Result;
use crate::rng::{self, tags};
use crate::statevector::StateVector;

/// `2 (1 − mean_k Tr[ρ_k²])` for one state.
pub fn meyer_wallach_state(state: &StateVector) -> f64 {
    let n = state.n_qubits();
    let mean_purity = (0..n).map(|k| state.reduced_purity(k).expect("qubit index in range")).sum::<f64>() / n as f64;
    (2.0 * (1.0 - mean_purity)).clamp(0.0, 1.0)
}

/// Meyer-Wallach measure averaged over `n_samples` random `(θ, x)` draws.
pub fn meyer_wallach(spec: &CircuitSpec, n_samples: usize, seed: u64) -> Result<f64> {
    if n_samples == 0 {
        return Err(crate::Error::usage("Meyer-Wallach average needs at least one sample"));
    }
    let values: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::tagged(seed, tags::MEYER_WALLACH, i as u64);
            let (theta, x) = draw_point(spec, &mut rng);
            Ok(meyer_wallach_state(&spec.prepare_state(&theta, &x)?))
        })
        .collect::<Result<_>>()?;
    Ok(values.iter().sum::<f64>() / n_samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_circuit, GateTemplate, Layer};
    use crate::statevector::Gate;

    #[test]
    fn ghz_is_maximal() {
        let mut gates = vec![GateTemplate::fixed(Gate::h(0))];
        gates.extend((0..3).map(|q| GateTemplate::fixed(Gate::cnot(q, q + 1))));
        let ghz = CircuitSpec::new(4, vec![Layer::Processing(gates)]).unwrap();
        assert!((meyer_wallach(&ghz, 5, 0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_circuits_are_zero() {
        for id in [1, 2, 6, 8, 11, 14, 20, 27, 28, 30] {
            let spec = build_circuit(id, 3).unwrap();
            assert!(meyer_wallach(&spec, 50, 9).unwrap().abs() < 1e-12, "circuit {id}");
        }
    }
}
