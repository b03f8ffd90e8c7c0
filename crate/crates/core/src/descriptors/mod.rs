//! Circuit descriptors and their correlation with detection quality.

mod correlation;
mod entanglement;
mod expressivity;
mod fourier;

use serde::{Deserialize, Serialize};

use crate::circuits::{CircuitSpec, EmbeddingKind};
use crate::error::Result;

pub use correlation::{pearson_correlation, spearman_correlation, CorrelationMethod};
pub use entanglement::{meyer_wallach, meyer_wallach_state};
pub use expressivity::{
    fidelity_histogram, haar_bin_masses, haar_fidelity_density, kl_to_haar, sample_fidelities, sim_expressivity,
};
pub use fourier::{
    fourier_descriptors, fourier_sweep, sweep_all_qubits, FourierDescriptors, FourierSpectrum, ABSOLUTE_FLOOR,
    PHASE_RESOLUTION, RELATIVE_THRESHOLD,
};

/// Sampling budget for [`describe`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DescriptorConfig {
    pub expressivity_samples: usize,
    pub expressivity_bins: usize,
    pub meyer_wallach_samples: usize,
    pub fourier_param_samples: usize,
    pub fourier_points: usize,
    pub seed: u64,
}

impl Default for DescriptorConfig {
    fn default() -> Self {
        Self {
            expressivity_samples: 1000,
            expressivity_bins: 100,
            meyer_wallach_samples: 1000,
            fourier_param_samples: 10,
            fourier_points: 64,
            seed: 0,
        }
    }
}

/// Per-circuit descriptor record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorReport {
    pub circuit_id: Option<u32>,
    pub embedding: Option<EmbeddingKind>,
    pub convergent: bool,
    pub n_params: usize,
    pub n_entangling_layers: usize,
    /// KL divergence to the Haar fidelity distribution, nats.
    pub sim_expressivity: f64,
    pub meyer_wallach: f64,
    pub n_positive_frequencies: usize,
    pub n_phases: usize,
    pub amplitude_variance: f64,
}

impl DescriptorReport {
    /// Values in [`DESCRIPTOR_ROWS`] order.
    pub fn row_values(&self) -> [f64; 7] {
        [
            self.n_params as f64,
            self.sim_expressivity,
            self.n_entangling_layers as f64,
            self.meyer_wallach,
            self.n_positive_frequencies as f64,
            self.n_phases as f64,
            self.amplitude_variance,
        ]
    }
}

pub fn describe(spec: &CircuitSpec, config: &DescriptorConfig) -> Result<DescriptorReport> {
    let fourier = fourier_descriptors(spec, config.fourier_param_samples, config.fourier_points, config.seed)?;
    Ok(DescriptorReport {
        circuit_id: spec.id,
        embedding: spec.embedding(),
        convergent: spec.convergent,
        n_params: spec.n_params,
        n_entangling_layers: spec.n_entangling_layers,
        sim_expressivity: sim_expressivity(spec, config.expressivity_samples, config.expressivity_bins, config.seed)?,
        meyer_wallach: meyer_wallach(spec, config.meyer_wallach_samples, config.seed)?,
        n_positive_frequencies: fourier.n_positive_frequencies,
        n_phases: fourier.n_phases,
        amplitude_variance: fourier.amplitude_variance,
    })
}

pub const DESCRIPTOR_ROWS: [&str; 7] = [
    "Amount of parameters",
    "Sim expressivity",
    "Amount of entangling layers",
    "Meyer-Wallach measure",
    "Amount of positive frequencies",
    "Amount of phases",
    "Variance of amplitudes",
];

pub const METRIC_COLUMNS: [&str; 4] = ["Precision", "Recall", "F1 score", "Reconstruction loss"];

pub const GROUP_ALL: &str = "All converged PQCs";
pub const GROUP_PAULI_X: &str = "PQCs that share Pauli-X embedding";

/// Groups with fewer circuits than this are flagged as low-n.
pub const LOW_N: usize = 5;

/// Descriptors plus the detection results of one circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitOutcome {
    pub descriptors: DescriptorReport,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub reconstruction_loss: f64,
}

impl CircuitOutcome {
    fn metric_values(&self) -> [f64; 4] {
        [self.precision, self.recall, self.f1, self.reconstruction_loss]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub descriptor: String,
    /// One entry per [`METRIC_COLUMNS`]; `None` where the coefficient is undefined.
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationBlock {
    pub grouping: String,
    pub method: CorrelationMethod,
    pub circuit_ids: Vec<u32>,
    pub low_n: bool,
    pub rows: Vec<CorrelationRow>,
}

/// Descriptor-vs-metric correlations for both circuit groupings. Circuits
/// flagged as non-convergent are excluded from both.
pub fn correlation_table(outcomes: &[CircuitOutcome], method: CorrelationMethod) -> Vec<CorrelationBlock> {
    let converged: Vec<&CircuitOutcome> = outcomes.iter().filter(|o| o.descriptors.convergent).collect();
    let pauli_x: Vec<&CircuitOutcome> =
        converged.iter().copied().filter(|o| o.descriptors.embedding == Some(EmbeddingKind::PauliX)).collect();
    vec![block(GROUP_ALL, &converged, method), block(GROUP_PAULI_X, &pauli_x, method)]
}

fn block(name: &str, group: &[&CircuitOutcome], method: CorrelationMethod) -> CorrelationBlock {
    let descriptors: Vec<[f64; 7]> = group.iter().map(|o| o.descriptors.row_values()).collect();
    let metrics: Vec<[f64; 4]> = group.iter().map(|o| o.metric_values()).collect();
    let rows = DESCRIPTOR_ROWS
        .iter()
        .enumerate()
        .map(|(r, name)| {
            let xs: Vec<f64> = descriptors.iter().map(|d| d[r]).collect();
            let values = (0..METRIC_COLUMNS.len())
                .map(|c| {
                    let ys: Vec<f64> = metrics.iter().map(|m| m[c]).collect();
                    method.apply(&xs, &ys).ok()
                })
                .collect();
            CorrelationRow { descriptor: name.to_string(), values }
        })
        .collect();
    CorrelationBlock {
        grouping: name.to_string(),
        method,
        circuit_ids: group.iter().filter_map(|o| o.descriptors.circuit_id).collect(),
        low_n: group.len() < LOW_N,
        rows,
    }
}

/// Human-readable rendering of correlation blocks.
pub fn format_correlation_table(blocks: &[CorrelationBlock]) -> String {
    let mut out = String::new();
    out.push_str(&format!("{:<32}", "Descriptors"));
    for c in METRIC_COLUMNS {
        out.push_str(&format!("{c:>21}"));
    }
    out.push('\n');
    for b in blocks {
        let flag = if b.low_n { " [low n]" } else { "" };
        out.push_str(&format!("-- {} (n = {}){flag}\n", b.grouping, b.circuit_ids.len()));
        for row in &b.rows {
            out.push_str(&format!("{:<32}", row.descriptor));
            for v in &row.values {
                match v {
                    Some(v) => out.push_str(&format!("{v:>21.3}")),
                    None => out.push_str(&format!("{:>21}", "n/a")),
                }
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::build_circuit;

    fn outcome(id: u32, f1: f64) -> CircuitOutcome {
        let spec = build_circuit(id, 0).unwrap();
        CircuitOutcome {
            descriptors: DescriptorReport {
                circuit_id: Some(id),
                embedding: spec.embedding(),
                convergent: spec.convergent,
                n_params: spec.n_params,
                n_entangling_layers: spec.n_entangling_layers,
                sim_expressivity: id as f64 * 0.1,
                meyer_wallach: (id as f64 * 0.37).sin().abs(),
                n_positive_frequencies: spec.n_embedding_repetitions,
                n_phases: id as usize % 5,
                amplitude_variance: 0.01 * id as f64,
            },
            precision: f1 + 0.01,
            recall: f1 * f1,
            f1,
            reconstruction_loss: 1.0 / id as f64,
        }
    }

    #[test]
    fn table_structure_and_groupings() {
        let outcomes: Vec<_> = (1..=32).map(|id| outcome(id, 0.5 + 0.01 * id as f64)).collect();
        let blocks = correlation_table(&outcomes, CorrelationMethod::Pearson);
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].grouping, GROUP_ALL);
        assert_eq!(blocks[0].circuit_ids.len(), 28);
        assert_eq!(blocks[1].circuit_ids, vec![1, 2, 3, 4, 5, 6, 8, 9, 10, 11, 12, 13]);
        for b in &blocks {
            let names: Vec<&str> = b.rows.iter().map(|r| r.descriptor.as_str()).collect();
            assert_eq!(names, DESCRIPTOR_ROWS);
            assert!(b.rows.iter().all(|r| r.values.len() == 4));
        }
        // f1 is monotone in the id, as is sim_expressivity.
        assert!((blocks[0].rows[1].values[2].unwrap() - 1.0).abs() < 1e-12);
        let text = format_correlation_table(&blocks);
        assert!(text.contains(GROUP_PAULI_X));
    }

    #[test]
    fn small_groups_are_flagged() {
        let outcomes = vec![outcome(3, 0.5), outcome(10, 0.7), outcome(13, 0.4)];
        let blocks = correlation_table(&outcomes, CorrelationMethod::Pearson);
        assert!(blocks[0].low_n);
        assert_eq!(blocks[0].circuit_ids, vec![3, 10, 13]);
        // Parameter counts 4, 8, 12 vs f1.
        assert!(blocks[0].rows[0].values[2].is_some());
    }
}
