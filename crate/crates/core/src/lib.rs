//! Hybrid classical-quantum autoencoder for anomaly detection.
//!
//! A classical encoder compresses each sample to four values, a simulated
//! parametrized quantum circuit maps them to Pauli-Z expectations, and an
//! Isolation Forest flags outliers in that latent space.

pub mod autoencoder;
pub mod circuits;
pub mod descriptors;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod outlier;
pub mod preprocess;
pub mod rng;
pub mod statevector;
pub mod synth;

pub use autoencoder::{encode_latent, train, Model, ModelKind, TrainConfig};
pub use circuits::{build_circuit, evaluate, CircuitSpec, EmbeddingKind, Layer};
pub use descriptors::{describe, DescriptorConfig, DescriptorReport};
pub use error::{Error, Result};
pub use metrics::{prf, windowed_prf, EvalResult};
pub use outlier::{ForestConfig, IsoForest};
pub use preprocess::{dbscan, denoise, elbow_eps, rescale_fit_transform, DbscanConfig, RescaleParams};
pub use statevector::{fidelity, Axis, Gate, StateVector};
pub use synth::{generate, SynthConfig, SynthData};
