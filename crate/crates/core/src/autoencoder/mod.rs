//! Dense autoencoders with an optional quantum-circuit bottleneck.
//!
//! All three variants share a tanh encoder `in → 56 → 4` and a decoder
//! `4 → 56 → in` whose last layer is linear. The bottleneck is either
//! nothing (classical AE), a four-qubit circuit whose Pauli-Z expectations
//! form the latent vector (HAE), or a classical `4 → 16 → 4` expansion
//! (modified AE).

mod dense;
mod train;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use rand::Rng as _;

use crate::circuits::{evaluate, jacobians, CircuitSpec};
use crate::error::{Error, Result};
use crate::rng::{self, tags};

pub use dense::{Activation, DenseLayer, Mlp};
pub use train::{loss, train, LossKind, Optimizer, TrainConfig, Training};

pub const HIDDEN_WIDTH: usize = 56;
pub const LATENT_DIM: usize = 4;
pub const EXPANSION_WIDTH: usize = 16;

/// Model file format version written by [`Model::to_json`].
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    #[serde(rename = "ae")]
    ClassicalAe,
    Hae,
    ModifiedAe,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::ClassicalAe => "ae",
            ModelKind::Hae => "hae",
            ModelKind::ModifiedAe => "modified-ae",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ae" | "classical" => Ok(ModelKind::ClassicalAe),
            "hae" | "hybrid" => Ok(ModelKind::Hae),
            "modified-ae" | "modified" | "mae" => Ok(ModelKind::ModifiedAe),
            other => Err(Error::usage(format!("unknown model variant `{other}`"))),
        }
    }
}

/// What sits between encoder and decoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Bottleneck {
    Identity,
    Circuit { circuit: CircuitSpec, theta: Vec<f64> },
    Expansion { layers: Mlp },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    encoder: Mlp,
    bottleneck: Bottleneck,
    decoder: Mlp,
}

/// Output of a single forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    pub reconstruction: Vec<f64>,
    pub latent: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    variant: ModelKind,
    model: Model,
}

impl Model {
    /// Assembles and validates a model from explicit parts.
    pub fn new(encoder: Mlp, bottleneck: Bottleneck, decoder: Mlp) -> Result<Self> {
        let model = Self { encoder, bottleneck, decoder };
        model.validate()?;
        Ok(model)
    }

    pub fn classical(n_features: usize, seed: u64) -> Result<Self> {
        let mut rng = init_rng(n_features, seed)?;
        let encoder = encoder(n_features, &mut rng);
        let decoder = decoder(n_features, &mut rng);
        Self::new(encoder, Bottleneck::Identity, decoder)
    }

    /// HAE around `circuit`, which must act on [`LATENT_DIM`] qubits.
    pub fn hybrid(n_features: usize, circuit: CircuitSpec, seed: u64) -> Result<Self> {
        let mut rng = init_rng(n_features, seed)?;
        let encoder = encoder(n_features, &mut rng);
        let theta = (0..circuit.n_params).map(|_| rng.random_range(-PI..=PI)).collect();
        let decoder = decoder(n_features, &mut rng);
        Self::new(encoder, Bottleneck::Circuit { circuit, theta }, decoder)
    }

    pub fn modified(n_features: usize, seed: u64) -> Result<Self> {
        let mut rng = init_rng(n_features, seed)?;
        let encoder = encoder(n_features, &mut rng);
        let layers =
            Mlp::uniform(&[LATENT_DIM, EXPANSION_WIDTH, LATENT_DIM], Activation::Tanh, Activation::Tanh, &mut rng);
        let decoder = decoder(n_features, &mut rng);
        Self::new(encoder, Bottleneck::Expansion { layers }, decoder)
    }

    /// Fresh model of the requested kind. `circuit` is required for the HAE
    /// and rejected otherwise.
    pub fn build(kind: ModelKind, n_features: usize, circuit: Option<CircuitSpec>, seed: u64) -> Result<Self> {
        match (kind, circuit) {
            (ModelKind::Hae, Some(c)) => Self::hybrid(n_features, c, seed),
            (ModelKind::Hae, None) => Err(Error::config("the HAE variant needs a circuit id")),
            (_, Some(_)) => Err(Error::config("a circuit id is only valid for the HAE variant")),
            (ModelKind::ClassicalAe, None) => Self::classical(n_features, seed),
            (ModelKind::ModifiedAe, None) => Self::modified(n_features, seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.encoder.validate()?;
        self.decoder.validate()?;
        if self.encoder.n_out() != LATENT_DIM || self.decoder.n_in() != LATENT_DIM {
            return Err(Error::ModelFormat(format!("encoder output and decoder input must be {LATENT_DIM} wide")));
        }
        if self.encoder.n_in() != self.decoder.n_out() {
            return Err(Error::ModelFormat("decoder output width differs from input width".into()));
        }
        match &self.bottleneck {
            Bottleneck::Identity => {}
            Bottleneck::Circuit { circuit, theta } => {
                if circuit.n_qubits != LATENT_DIM {
                    return Err(Error::config(format!(
                        "circuit acts on {} qubits, the latent space has {LATENT_DIM}",
                        circuit.n_qubits
                    )));
                }
                if theta.len() != circuit.n_params || !theta.iter().all(|t| t.is_finite()) {
                    return Err(Error::ModelFormat("circuit parameter vector invalid".into()));
                }
            }
            Bottleneck::Expansion { layers } => {
                layers.validate()?;
                let widths: Vec<usize> =
                    std::iter::once(layers.n_in()).chain(layers.layers().iter().map(DenseLayer::n_out)).collect();
                if widths != [LATENT_DIM, EXPANSION_WIDTH, LATENT_DIM] {
                    return Err(Error::ModelFormat(format!("expansion widths {widths:?}, expected 4-16-4")));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> ModelKind {
        match self.bottleneck {
            Bottleneck::Identity => ModelKind::ClassicalAe,
            Bottleneck::Circuit { .. } => ModelKind::Hae,
            Bottleneck::Expansion { .. } => ModelKind::ModifiedAe,
        }
    }

    pub fn n_features(&self) -> usize {
        self.encoder.n_in()
    }

    pub fn encoder(&self) -> &Mlp {
        &self.encoder
    }

    pub fn decoder(&self) -> &Mlp {
        &self.decoder
    }

    pub fn bottleneck(&self) -> &Bottleneck {
        &self.bottleneck
    }

    pub fn circuit(&self) -> Option<&CircuitSpec> {
        match &self.bottleneck {
            Bottleneck::Circuit { circuit, .. } => Some(circuit),
            _ => None,
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Forward> {
        self.check_width(x)?;
        let latent = self.latent_unchecked(x)?;
        let reconstruction = self.decoder.forward(&latent);
        Ok(Forward { reconstruction, latent })
    }

    fn latent_unchecked(&self, x: &[f64]) -> Result<Vec<f64>> {
        let code = self.encoder.forward(x);
        match &self.bottleneck {
            Bottleneck::Identity => Ok(code),
            Bottleneck::Circuit { circuit, theta } => evaluate(circuit, theta, &code),
            Bottleneck::Expansion { layers } => Ok(layers.forward(&code)),
        }
    }

    fn check_width(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features() {
            return Err(Error::usage(format!("sample has {} features, model expects {}", x.len(), self.n_features())));
        }
        Ok(())
    }

    /// Total count of trainable scalars.
    pub fn n_parameters(&self) -> usize {
        let core = match &self.bottleneck {
            Bottleneck::Identity => 0,
            Bottleneck::Circuit { theta, .. } => theta.len(),
            Bottleneck::Expansion { layers } => layers.n_parameters(),
        };
        self.encoder.n_parameters() + core + self.decoder.n_parameters()
    }

    /// All trainable scalars: encoder, bottleneck, decoder; each layer's
    /// weights (row-major) before its biases.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_parameters());
        self.encoder.write_params(&mut out);
        match &self.bottleneck {
            Bottleneck::Identity => {}
            Bottleneck::Circuit { theta, .. } => out.extend_from_slice(theta),
            Bottleneck::Expansion { layers } => layers.write_params(&mut out),
        }
        self.decoder.write_params(&mut out);
        out
    }

    /// Inverse of [`Model::parameters`].
    pub fn set_parameters(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_parameters() {
            return Err(Error::usage(format!("expected {} parameters, got {}", self.n_parameters(), params.len())));
        }
        let mut off = self.encoder.read_params(params);
        match &mut self.bottleneck {
            Bottleneck::Identity => {}
            Bottleneck::Circuit { theta, .. } => {
                let n = theta.len();
                theta.copy_from_slice(&params[off..off + n]);
                off += n;
            }
            Bottleneck::Expansion { layers } => off += layers.read_params(&params[off..]),
        }
        self.decoder.read_params(&params[off..]);
        Ok(())
    }

    /// Reconstruction of `x` together with the gradient of the summed squared
    /// error `Σ (r − x)²` accumulated into `grad` in [`Model::parameters`] order.
    pub(crate) fn accumulate_sse_gradient(&self, x: &[f64], grad: &mut [f64]) -> Result<Vec<f64>> {
        self.check_width(x)?;
        let enc_trace = self.encoder.trace(x);
        let code = enc_trace.last().expect("nonempty");
        let n_enc = self.encoder.n_parameters();

        enum CoreTrace {
            Identity,
            Circuit(crate::circuits::Jacobians),
            Expansion(Vec<Vec<f64>>),
        }
        let (core, latent) = match &self.bottleneck {
            Bottleneck::Identity => (CoreTrace::Identity, code.clone()),
            Bottleneck::Circuit { circuit, theta } => {
                let jac = jacobians(circuit, theta, code)?;
                let value = jac.value.clone();
                (CoreTrace::Circuit(jac), value)
            }
            Bottleneck::Expansion { layers } => {
                let t = layers.trace(code);
                let out = t.last().expect("nonempty").clone();
                (CoreTrace::Expansion(t), out)
            }
        };
        let n_core = self.n_parameters() - n_enc - self.decoder.n_parameters();

        let dec_trace = self.decoder.trace(&latent);
        let recon = dec_trace.last().expect("nonempty").clone();
        let grad_recon: Vec<f64> = recon.iter().zip(x).map(|(r, t)| 2.0 * (r - t)).collect();

        let (enc_grad, rest) = grad.split_at_mut(n_enc);
        let (core_grad, dec_grad) = rest.split_at_mut(n_core);
        let grad_latent = self.decoder.backward(&dec_trace, &grad_recon, dec_grad);
        let grad_code = match (&self.bottleneck, core) {
            (Bottleneck::Circuit { .. }, CoreTrace::Circuit(jac)) => {
                for (i, g) in grad_latent.iter().enumerate() {
                    for (j, d) in jac.params[i].iter().enumerate() {
                        core_grad[j] += g * d;
                    }
                }
                (0..LATENT_DIM).map(|q| (0..LATENT_DIM).map(|i| grad_latent[i] * jac.inputs[i][q]).sum()).collect()
            }
            (Bottleneck::Expansion { layers }, CoreTrace::Expansion(t)) => layers.backward(&t, &grad_latent, core_grad),
            _ => grad_latent,
        };
        self.encoder.backward(&enc_trace, &grad_code, enc_grad);
        Ok(recon)
    }

    /// Versioned JSON model document.
    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDocument { format_version: MODEL_FORMAT_VERSION, variant: self.kind(), model: self.clone() };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Parses a model document. Registry circuits are rebuilt from their id
    /// and seed and must match the stored gates exactly.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelFormat(format!("unsupported model format version {}", doc.format_version)));
        }
        if doc.model.kind() != doc.variant {
            return Err(Error::ModelFormat("variant tag does not match model body".into()));
        }
        doc.model.verify()?;
        Ok(doc.model)
    }

    /// Structural validation plus, for registry circuits, a check that the
    /// stored gates equal the circuit rebuilt from its id and seed.
    pub fn verify(&self) -> Result<()> {
        self.validate()?;
        if let Some(circuit) = self.circuit() {
            if let Some(id) = circuit.id {
                let rebuilt = crate::circuits::build_circuit(id, circuit.seed)?;
                if &rebuilt != circuit {
                    return Err(Error::ModelFormat(format!("stored circuit differs from registry circuit {id}")));
                }
            }
        }
        Ok(())
    }
}

fn init_rng(n_features: usize, seed: u64) -> Result<rng::Rng> {
    if n_features == 0 {
        return Err(Error::usage("model needs at least one input feature"));
    }
    Ok(rng::tagged(seed, tags::INIT, 0))
}

fn encoder(n_features: usize, rng: &mut rng::Rng) -> Mlp {
    Mlp::uniform(&[n_features, HIDDEN_WIDTH, LATENT_DIM], Activation::Tanh, Activation::Tanh, rng)
}

fn decoder(n_features: usize, rng: &mut rng::Rng) -> Mlp {
    Mlp::uniform(&[LATENT_DIM, HIDDEN_WIDTH, n_features], Activation::Tanh, Activation::Identity, rng)
}

/// Latent vector of every row.
pub fn encode_latent(model: &Model, data: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    data.par_iter()
        .map(|x| {
            model.check_width(x)?;
            model.latent_unchecked(x)
        })
        .collect()
}

/// Reconstruction of every row.
pub fn reconstruct(model: &Model, data: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    data.par_iter().map(|x| Ok(model.forward(x)?.reconstruction)).collect()
}
