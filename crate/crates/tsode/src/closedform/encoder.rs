//! Encoder network over a frozen spectrum: a small MLP reads a history
//! window and emits the amplitudes C and time shift t0 of a closed-form
//! model whose alphas and betas were already fitted. Training backpropagates
//! through the modal sum analytically; no solver in the loop.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::eval_point;
use crate::error::{Error, Result};
use crate::nn::{train, Activation, GradModel, Mlp, Optimizer, TrainOptions};
use crate::series::WindowPair;

/// MLP from history window (length m) to [C (2K values), t0], bound to the
/// frozen mode parameters and the grid spacing it was trained on. Window
/// time is local: history samples sit at 0, dt, ..., (m-1)·dt and forecasts
/// continue from m·dt.
#[derive(Debug, Clone)]
pub struct EncoderModel {
    net: Mlp,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    m: usize,
    dt: f64,
}

impl EncoderModel {
    pub fn new(
        m: usize,
        dt: f64,
        alphas: Vec<f64>,
        betas: Vec<f64>,
        hidden: usize,
        seed: u64,
    ) -> Result<Self> {
        let k = betas.len();
        if k == 0 {
            return Err(Error::TooShort { required: 1, actual: 0 });
        }
        if alphas.len() != k {
            return Err(Error::LengthMismatch { left: k, right: alphas.len() });
        }
        if m == 0 || hidden == 0 || !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "encoder".into(),
                reason: format!("m={m}, hidden={hidden}, dt={dt}"),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = Mlp::glorot(
            &[m, hidden, 2 * k + 1],
            &[Activation::Relu, Activation::Identity],
            &mut rng,
        )?;
        Ok(Self { net, alphas, betas, m, dt })
    }

    pub fn k(&self) -> usize {
        self.betas.len()
    }

    pub fn history_len(&self) -> usize {
        self.m
    }

    /// Predicted (C, t0) for one history window.
    pub fn coefficients(&self, history: &[f64]) -> Result<(Vec<f64>, f64)> {
        if history.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: history.len() });
        }
        let out = self.net.forward(history)?;
        let k2 = 2 * self.k();
        Ok((out[..k2].to_vec(), out[k2]))
    }
}

impl GradModel for EncoderModel {
    fn num_params(&self) -> usize {
        self.net.num_params()
    }

    fn params(&self) -> Vec<f64> {
        self.net.params()
    }

    fn set_params(&mut self, p: &[f64]) -> Result<()> {
        self.net.set_params(p)
    }

    fn loss_grad(&self, input: &[f64], target: &[f64], grad: &mut [f64]) -> Result<f64> {
        let horizon = target.len();
        if horizon == 0 {
            return Err(Error::TooShort { required: 1, actual: 0 });
        }
        let out = self.net.forward(input)?;
        let k = self.k();
        let (c, t0) = (&out[..2 * k], out[2 * k]);

        let mut loss = 0.0;
        let mut upstream = vec![0.0; 2 * k + 1];
        for (j, &want) in target.iter().enumerate() {
            let t = (self.m + j) as f64 * self.dt;
            let tau = t - t0;
            let mut pred = 0.0;
            let mut dpred_dtau = 0.0;
            let mut basis = vec![0.0; 2 * k];
            for (i, (&a, &b)) in self.alphas.iter().zip(&self.betas).enumerate() {
                let exponent = a * tau;
                if exponent > 700.0 {
                    return Err(Error::Overflow { exponent });
                }
                let amp = exponent.exp();
                let (s, co) = (b * tau).sin_cos();
                let (ca, cb) = (c[2 * i], c[2 * i + 1]);
                basis[2 * i] = amp * (co - s);
                basis[2 * i + 1] = amp * (co + s);
                let term = ca * basis[2 * i] + cb * basis[2 * i + 1];
                pred += term;
                dpred_dtau += a * term + amp * b * (ca * (-s - co) + cb * (-s + co));
            }
            let e = pred - want;
            loss += e * e;
            let g = 2.0 * e / horizon as f64;
            for (u, b) in upstream.iter_mut().zip(&basis) {
                *u += g * b;
            }
            upstream[2 * k] += g * (-dpred_dtau);
        }

        let (g_flat, _) = self.net.backward(input, &upstream)?;
        for (acc, gi) in grad.iter_mut().zip(g_flat) {
            *acc += gi;
        }
        Ok(loss / horizon as f64)
    }
}

/// Evaluates the encoder's model on the `n` grid points following the
/// history window.
pub fn forecast(encoder: &EncoderModel, history: &[f64], n: usize) -> Result<Vec<f64>> {
    let (c, t0) = encoder.coefficients(history)?;
    (0..n)
        .map(|j| {
            let t = (encoder.m + j) as f64 * encoder.dt;
            eval_point(&encoder.alphas, &encoder.betas, &c, t0, t)
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct EncoderTrainOpts {
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub lr: f64,
    pub hidden: usize,
}

impl Default for EncoderTrainOpts {
    fn default() -> Self {
        Self { epochs: 400, batch_size: 32, seed: 0, lr: 1e-3, hidden: 128 }
    }
}

#[derive(Debug, Clone)]
pub struct EncoderFit {
    pub model: EncoderModel,
    pub loss_history: Vec<f64>,
}

/// Trains an encoder on history/target windows against a frozen spectrum.
/// Targets are matched at the grid points right after each history window.
pub fn train_encoder(
    windows: &[WindowPair],
    alphas: &[f64],
    betas: &[f64],
    dt: f64,
    opts: &EncoderTrainOpts,
) -> Result<EncoderFit> {
    let first = windows.first().ok_or(Error::TooShort { required: 1, actual: 0 })?;
    let m = first.history.len();
    for w in windows {
        if w.history.len() != m {
            return Err(Error::LengthMismatch { left: m, right: w.history.len() });
        }
        if w.target.is_empty() {
            return Err(Error::TooShort { required: 1, actual: 0 });
        }
    }

    let mut model =
        EncoderModel::new(m, dt, alphas.to_vec(), betas.to_vec(), opts.hidden, opts.seed)?;
    let data: Vec<(Vec<f64>, Vec<f64>)> =
        windows.iter().map(|w| (w.history.clone(), w.target.clone())).collect();
    let mut optimizer = Optimizer::adam(opts.lr, model.num_params());
    let train_opts =
        TrainOptions { epochs: opts.epochs, batch_size: opts.batch_size, seed: opts.seed };
    let loss_history = train(&mut model, &data, &mut optimizer, &train_opts)?;
    Ok(EncoderFit { model, loss_history })
}
