//! Minimal neural-network engine: dense layers, an LSTM cell, optimizers,
//! training, and reverse-mode gradients.
//!
//! Parameters are exposed as flat vectors with a fixed layout (per layer:
//! weights row-major, then bias) so optimizer state and checkpoints stay
//! aligned with the model.

mod checkpoint;
mod lstm;
mod optim;
mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use lstm::LstmLayer;
pub use optim::Optimizer;
pub use train::{mse_loss, train, GradModel, TrainOptions};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::Mat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the activation output. Valid for all
    /// three kinds: relu output is positive iff its input was, tanh' = 1−y².
    fn deriv_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }
}

/// Affine map plus activation. Parameter count is out·in + out.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Mat,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn zeros(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self {
            weights: Mat::zeros(out_dim, in_dim),
            bias: vec![0.0; out_dim],
            activation,
        }
    }

    /// Glorot-uniform initialization in ±√(6/(in+out)); biases start at zero.
    pub fn glorot<R: Rng>(in_dim: usize, out_dim: usize, activation: Activation, rng: &mut R) -> Self {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let mut layer = Self::zeros(in_dim, out_dim, activation);
        for w in layer.weights.data_mut() {
            *w = rng.gen_range(-limit..limit);
        }
        layer
    }

    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn num_params(&self) -> usize {
        self.out_dim() * self.in_dim() + self.out_dim()
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim(),
                got: x.len(),
            });
        }
        let mut z = self.weights.matvec(x);
        for (zi, b) in z.iter_mut().zip(&self.bias) {
            *zi = self.activation.apply(*zi + b);
        }
        Ok(z)
    }
}

/// Feed-forward network; adjacent layer dimensions chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<DenseLayer>,
}

impl Mlp {
    /// Glorot-initialized network with the given layer widths, e.g.
    /// dims=[100,128,100] and one activation per layer transition.
    pub fn glorot<R: Rng>(dims: &[usize], activations: &[Activation], rng: &mut R) -> Result<Self> {
        if dims.len() < 2 || activations.len() != dims.len() - 1 {
            return Err(Error::InvalidParameter {
                name: "dims".into(),
                reason: format!(
                    "need one activation per layer: {} dims, {} activations",
                    dims.len(),
                    activations.len()
                ),
            });
        }
        let layers = dims
            .windows(2)
            .zip(activations)
            .map(|(w, &act)| DenseLayer::glorot(w[0], w[1], act, rng))
            .collect();
        Ok(Self { layers })
    }

    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Self> {
        for pair in layers.windows(2) {
            if pair[0].out_dim() != pair[1].in_dim() {
                return Err(Error::DimensionMismatch {
                    expected: pair[0].out_dim(),
                    got: pair[1].in_dim(),
                });
            }
        }
        if layers.is_empty() {
            return Err(Error::InvalidParameter {
                name: "layers".into(),
                reason: "network needs at least one layer".into(),
            });
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.in_dim()];
        dims.extend(self.layers.iter().map(DenseLayer::out_dim));
        dims
    }

    pub fn activations(&self) -> Vec<Activation> {
        self.layers.iter().map(|l| l.activation).collect()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(DenseLayer::num_params).sum()
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.num_params());
        for layer in &self.layers {
            p.extend_from_slice(layer.weights.data());
            p.extend_from_slice(&layer.bias);
        }
        p
    }

    pub fn set_params(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.num_params() {
            return Err(Error::DimensionMismatch {
                expected: self.num_params(),
                got: p.len(),
            });
        }
        let mut at = 0;
        for layer in &mut self.layers {
            let nw = layer.weights.data().len();
            layer.weights.data_mut().copy_from_slice(&p[at..at + nw]);
            at += nw;
            let nb = layer.bias.len();
            layer.bias.copy_from_slice(&p[at..at + nb]);
            at += nb;
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut h = x.to_vec();
        for layer in &self.layers {
            h = layer.forward(&h)?;
        }
        Ok(h)
    }

    /// Activations of every layer, starting with the input itself.
    fn forward_trace(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        for layer in &self.layers {
            let next = layer.forward(acts.last().expect("non-empty"))?;
            acts.push(next);
        }
        Ok(acts)
    }

    /// Reverse-mode gradients of a scalar loss whose gradient at the network
    /// output is `upstream`. Returns (flat parameter gradients, input gradient).
    pub fn backward(&self, x: &[f64], upstream: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if upstream.len() != self.out_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.out_dim(),
                got: upstream.len(),
            });
        }
        let acts = self.forward_trace(x)?;
        let mut grads = vec![0.0; self.num_params()];

        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut at = 0;
        for layer in &self.layers {
            offsets.push(at);
            at += layer.num_params();
        }

        let mut delta = upstream.to_vec();
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let output = &acts[l + 1];
            let input = &acts[l];
            let dz: Vec<f64> = delta
                .iter()
                .zip(output)
                .map(|(d, y)| d * layer.activation.deriv_from_output(*y))
                .collect();

            let base = offsets[l];
            let (in_dim, out_dim) = (layer.in_dim(), layer.out_dim());
            for i in 0..out_dim {
                let row = base + i * in_dim;
                for j in 0..in_dim {
                    grads[row + j] += dz[i] * input[j];
                }
                grads[base + out_dim * in_dim + i] += dz[i];
            }
            delta = layer.weights.matvec_t(&dz);
        }
        Ok((grads, delta))
    }
}

#[cfg(test)]
pub(crate) fn finite_difference_grad<F: FnMut(&[f64]) -> f64>(
    params: &[f64],
    mut loss: F,
) -> Vec<f64> {
    let h = 1e-5;
    let mut grad = vec![0.0; params.len()];
    let mut p = params.to_vec();
    for i in 0..p.len() {
        let orig = p[i];
        p[i] = orig + h;
        let up = loss(&p);
        p[i] = orig - h;
        let down = loss(&p);
        p[i] = orig;
        grad[i] = (up - down) / (2.0 * h);
    }
    grad
}

#[cfg(test)]
pub(crate) fn max_rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-6))
        .fold(0.0, f64::max)
}
