//! Mini-batch training loop over any model exposing flat parameters and
//! per-example loss gradients.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::{Mlp, Optimizer};

/// A trainable model with flat parameters and mean-squared-error semantics:
/// `loss_grad` adds one example's parameter gradient into `grad` and returns
/// that example's loss.
pub trait GradModel {
    fn num_params(&self) -> usize;
    fn params(&self) -> Vec<f64>;
    fn set_params(&mut self, p: &[f64]) -> Result<()>;
    fn loss_grad(&self, input: &[f64], target: &[f64], grad: &mut [f64]) -> Result<f64>;
}

impl GradModel for Mlp {
    fn num_params(&self) -> usize {
        Mlp::num_params(self)
    }

    fn params(&self) -> Vec<f64> {
        Mlp::params(self)
    }

    fn set_params(&mut self, p: &[f64]) -> Result<()> {
        Mlp::set_params(self, p)
    }

    fn loss_grad(&self, input: &[f64], target: &[f64], grad: &mut [f64]) -> Result<f64> {
        if target.len() != self.out_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.out_dim(),
                got: target.len(),
            });
        }
        let out = self.forward(input)?;
        let n = out.len() as f64;
        let upstream: Vec<f64> = out.iter().zip(target).map(|(o, t)| 2.0 * (o - t) / n).collect();
        let (g, _) = self.backward(input, &upstream)?;
        for (acc, gi) in grad.iter_mut().zip(g) {
            *acc += gi;
        }
        Ok(out.iter().zip(target).map(|(o, t)| (o - t).powi(2)).sum::<f64>() / n)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrainOptions {
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self { epochs: 200, batch_size: 32, seed: 0 }
    }
}

/// Trains `model` on `(input, target)` pairs with seeded-shuffle mini-batches.
/// Returns the mean loss per epoch. A non-finite epoch loss aborts with the
/// offending epoch.
pub fn train<M: GradModel>(
    model: &mut M,
    data: &[(Vec<f64>, Vec<f64>)],
    optimizer: &mut Optimizer,
    opts: &TrainOptions,
) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::TooShort { required: 1, actual: 0 });
    }
    if opts.batch_size == 0 {
        return Err(Error::InvalidParameter {
            name: "batch_size".into(),
            reason: "must be at least 1".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut params = model.params();
    let mut grad = vec![0.0; params.len()];
    let mut history = Vec::with_capacity(opts.epochs);

    for epoch in 0..opts.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(opts.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut batch_loss = 0.0;
            for &idx in batch {
                let (input, target) = &data[idx];
                batch_loss += model.loss_grad(input, target, &mut grad)?;
            }
            let scale = 1.0 / batch.len() as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            optimizer.step(&mut params, &grad);
            model.set_params(&params)?;
            epoch_loss += batch_loss;
        }
        epoch_loss /= data.len() as f64;
        if !epoch_loss.is_finite() {
            return Err(Error::Diverged { iteration: epoch, loss: epoch_loss });
        }
        history.push(epoch_loss);
    }
    Ok(history)
}

/// Builds the MSE loss of an [`Mlp`] on a dataset; handy for reporting.
pub fn mse_loss(net: &Mlp, data: &[(Vec<f64>, Vec<f64>)]) -> Result<f64> {
    let mut total = 0.0;
    for (input, target) in data {
        let out = net.forward(input)?;
        if out.len() != target.len() {
            return Err(Error::LengthMismatch { left: out.len(), right: target.len() });
        }
        total += out.iter().zip(target).map(|(o, t)| (o - t).powi(2)).sum::<f64>()
            / out.len() as f64;
    }
    Ok(total / data.len() as f64)
}
