//! Fully connected layers with explicit backpropagation.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the activation output.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }
}

/// `y = act(W x + b)` with `W` stored row-major as `n_out × n_in`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    n_in: usize,
    n_out: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
    activation: Activation,
}

impl DenseLayer {
    pub fn new(n_in: usize, n_out: usize, weights: Vec<f64>, biases: Vec<f64>, activation: Activation) -> Result<Self> {
        let layer = Self { n_in, n_out, weights, biases, activation };
        layer.validate()?;
        Ok(layer)
    }

    pub fn zeros(n_in: usize, n_out: usize, activation: Activation) -> Self {
        Self { n_in, n_out, weights: vec![0.0; n_in * n_out], biases: vec![0.0; n_out], activation }
    }

    /// Weights and biases uniform in `±1/√n_in`.
    pub fn uniform(n_in: usize, n_out: usize, activation: Activation, rng: &mut crate::rng::Rng) -> Self {
        let bound = 1.0 / (n_in as f64).sqrt();
        let mut draw = || rng.random_range(-bound..=bound);
        let weights = (0..n_in * n_out).map(|_| draw()).collect();
        let biases = (0..n_out).map(|_| draw()).collect();
        Self { n_in, n_out, weights, biases, activation }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_in == 0 || self.n_out == 0 {
            return Err(Error::ModelFormat("layer with zero width".into()));
        }
        if self.weights.len() != self.n_in * self.n_out || self.biases.len() != self.n_out {
            return Err(Error::ModelFormat(format!(
                "layer {}x{} has {} weights and {} biases",
                self.n_out,
                self.n_in,
                self.weights.len(),
                self.biases.len()
            )));
        }
        if !self.weights.iter().chain(&self.biases).all(|v| v.is_finite()) {
            return Err(Error::ModelFormat("non-finite layer entry".into()));
        }
        Ok(())
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn n_parameters(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n_in);
        self.weights
            .chunks_exact(self.n_in)
            .zip(&self.biases)
            .map(|(row, b)| {
                let z = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b;
                self.activation.apply(z)
            })
            .collect()
    }

    /// Adds `∂L/∂W, ∂L/∂b` into `grad` (weights then biases) and returns `∂L/∂x`.
    fn backward(&self, input: &[f64], output: &[f64], grad_out: &[f64], grad: &mut [f64]) -> Vec<f64> {
        let (gw, gb) = grad.split_at_mut(self.weights.len());
        let mut grad_in = vec![0.0; self.n_in];
        for o in 0..self.n_out {
            let delta = grad_out[o] * self.activation.derivative_from_output(output[o]);
            gb[o] += delta;
            let row = o * self.n_in;
            for i in 0..self.n_in {
                gw[row + i] += delta * input[i];
                grad_in[i] += delta * self.weights[row + i];
            }
        }
        grad_in
    }

    fn write_params(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(&self.weights);
        out.extend_from_slice(&self.biases);
    }

    fn read_params(&mut self, params: &[f64]) {
        let (w, b) = params.split_at(self.weights.len());
        self.weights.copy_from_slice(w);
        self.biases.copy_from_slice(b);
    }
}

/// A stack of dense layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mlp {
    layers: Vec<DenseLayer>,
}

impl Mlp {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        let mlp = Self { layers };
        mlp.validate()?;
        Ok(mlp)
    }

    /// Layers of the given widths, all with `activation` except the last,
    /// which uses `output`.
    pub(crate) fn uniform(
        widths: &[usize],
        activation: Activation,
        output: Activation,
        rng: &mut crate::rng::Rng,
    ) -> Self {
        let n = widths.len() - 1;
        let layers = (0..n)
            .map(|i| {
                let act = if i + 1 == n { output } else { activation };
                DenseLayer::uniform(widths[i], widths[i + 1], act, rng)
            })
            .collect();
        Self { layers }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::ModelFormat("empty layer stack".into()));
        }
        for layer in &self.layers {
            layer.validate()?;
        }
        for pair in self.layers.windows(2) {
            if pair[0].n_out != pair[1].n_in {
                return Err(Error::ModelFormat(format!(
                    "layer widths {} and {} do not chain",
                    pair[0].n_out, pair[1].n_in
                )));
            }
        }
        Ok(())
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn n_in(&self) -> usize {
        self.layers[0].n_in
    }

    pub fn n_out(&self) -> usize {
        self.layers[self.layers.len() - 1].n_out
    }

    pub fn n_parameters(&self) -> usize {
        self.layers.iter().map(DenseLayer::n_parameters).sum()
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.layers.iter().fold(x.to_vec(), |h, layer| layer.forward(&h))
    }

    /// Input followed by every layer's output.
    pub(crate) fn trace(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        for layer in &self.layers {
            let next = layer.forward(acts.last().expect("nonempty"));
            acts.push(next);
        }
        acts
    }

    /// Backpropagates `grad_out` through a recorded trace, accumulating
    /// parameter gradients into `grad` in [`Mlp::write_params`] order.
    pub(crate) fn backward(&self, trace: &[Vec<f64>], grad_out: &[f64], grad: &mut [f64]) -> Vec<f64> {
        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut off = 0;
        for layer in &self.layers {
            offsets.push(off);
            off += layer.n_parameters();
        }
        let mut g = grad_out.to_vec();
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let slice = &mut grad[offsets[k]..offsets[k] + layer.n_parameters()];
            g = layer.backward(&trace[k], &trace[k + 1], &g, slice);
        }
        g
    }

    pub(crate) fn write_params(&self, out: &mut Vec<f64>) {
        for layer in &self.layers {
            layer.write_params(out);
        }
    }

    pub(crate) fn read_params(&mut self, params: &[f64]) -> usize {
        let mut off = 0;
        for layer in &mut self.layers {
            let n = layer.n_parameters();
            layer.read_params(&params[off..off + n]);
            off += n;
        }
        off
    }
}
