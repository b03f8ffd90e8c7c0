//! Reconstruction loss and mini-batch training.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Model;
use crate::error::{Error, Result};
use crate::rng::{self, tags};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    /// Mean over samples and features of the squared error.
    #[default]
    Mse,
    /// Square root of [`LossKind::Mse`].
    Rmse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Optimizer {
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
    Sgd,
}

impl Default for Optimizer {
    fn default() -> Self {
        Optimizer::Adam { beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Seeds the per-epoch shuffles.
    pub seed: u64,
    pub optimizer: Optimizer,
    pub loss: LossKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 80,
            batch_size: 32,
            learning_rate: 1e-3,
            seed: 0,
            optimizer: Optimizer::default(),
            loss: LossKind::Mse,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::config("batch_size must be positive"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::config("learning_rate must be positive"));
        }
        if let Optimizer::Adam { beta1, beta2, epsilon } = self.optimizer {
            let unit = |b: f64| (0.0..1.0).contains(&b);
            if !unit(beta1) || !unit(beta2) || epsilon.is_nan() || epsilon <= 0.0 {
                return Err(Error::config("Adam needs beta1, beta2 in [0, 1) and epsilon > 0"));
            }
        }
        Ok(())
    }
}

/// Reconstruction loss over a batch.
pub fn loss(reconstructions: &[Vec<f64>], inputs: &[Vec<f64>], kind: LossKind) -> Result<f64> {
    if reconstructions.is_empty() {
        return Err(Error::usage("loss of an empty batch"));
    }
    if reconstructions.len() != inputs.len() {
        return Err(Error::usage(format!("batch sizes differ: {} vs {}", reconstructions.len(), inputs.len())));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (r, x) in reconstructions.iter().zip(inputs) {
        if r.len() != x.len() {
            return Err(Error::usage("reconstruction and input widths differ"));
        }
        sum += r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        count += r.len();
    }
    let mse = sum / count.max(1) as f64;
    Ok(match kind {
        LossKind::Mse => mse,
        LossKind::Rmse => mse.sqrt(),
    })
}

/// Result of [`train`].
#[derive(Debug, Clone, PartialEq)]
pub struct Training {
    pub model: Model,
    /// Full-dataset loss before the first update.
    pub initial_loss: f64,
    /// Full-dataset loss after each epoch.
    pub loss_history: Vec<f64>,
}

impl Training {
    pub fn final_loss(&self) -> f64 {
        self.loss_history.last().copied().unwrap_or(self.initial_loss)
    }
}

struct Adam {
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

/// Gradient of the configured loss over `batch`, plus that loss.
pub(crate) fn batch_gradient(model: &Model, batch: &[&Vec<f64>], kind: LossKind) -> Result<(f64, Vec<f64>)> {
    let mut grad = vec![0.0; model.n_parameters()];
    let mut sse = 0.0;
    let mut count = 0usize;
    for x in batch {
        let r = model.accumulate_sse_gradient(x, &mut grad)?;
        sse += r.iter().zip(x.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        count += x.len();
    }
    let mse = sse / count as f64;
    let (value, scale) = match kind {
        LossKind::Mse => (mse, 1.0 / count as f64),
        LossKind::Rmse => {
            let rmse = mse.sqrt();
            (rmse, if rmse > 0.0 { 1.0 / (count as f64 * 2.0 * rmse) } else { 0.0 })
        }
    };
    grad.iter_mut().for_each(|g| *g *= scale);
    Ok((value, grad))
}

fn dataset_loss(model: &Model, data: &[Vec<f64>], kind: LossKind) -> Result<f64> {
    let recon = super::reconstruct(model, data)?;
    loss(&recon, data, kind)
}

/// Mini-batch training on the reconstruction objective. Deterministic for a
/// given model, data and config. A non-finite loss aborts with
/// [`Error::Diverged`] carrying the zero-based epoch index.
pub fn train(model: &Model, data: &[Vec<f64>], config: &TrainConfig) -> Result<Training> {
    config.validate()?;
    if data.len() < config.batch_size {
        return Err(Error::usage(format!(
            "{} training rows is fewer than the batch size {}",
            data.len(),
            config.batch_size
        )));
    }
    let mut model = model.clone();
    let initial_loss = dataset_loss(&model, data, config.loss)?;
    let mut params = model.parameters();
    let mut adam = match config.optimizer {
        Optimizer::Adam { beta1, beta2, epsilon } => {
            Some(Adam { beta1, beta2, epsilon, m: vec![0.0; params.len()], v: vec![0.0; params.len()], t: 0 })
        }
        Optimizer::Sgd => None,
    };
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut loss_history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let mut rng = rng::tagged(config.seed, tags::SHUFFLE, epoch as u64);
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<&Vec<f64>> = chunk.iter().map(|&i| &data[i]).collect();
            let (value, grad) = batch_gradient(&model, &batch, config.loss)?;
            if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::Diverged { epoch });
            }
            match adam.as_mut() {
                Some(a) => a.step(&mut params, &grad, config.learning_rate),
                None => params.iter_mut().zip(&grad).for_each(|(p, g)| *p -= config.learning_rate * g),
            }
            if params.iter().any(|p| !p.is_finite()) {
                return Err(Error::Diverged { epoch });
            }
            model.set_parameters(&params)?;
        }
        let epoch_loss = dataset_loss(&model, data, config.loss)?;
        if !epoch_loss.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        log::debug!("epoch {epoch}: loss {epoch_loss:.6e}");
        loss_history.push(epoch_loss);
    }
    Ok(Training { model, initial_loss, loss_history })
}
