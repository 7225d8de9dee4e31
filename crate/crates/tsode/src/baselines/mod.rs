//! Comparison forecasters: the repeater, window-to-window neural nets (dense
//! and LSTM), a seasonal ARIMA recurrence, and a latent ODE pipeline. All of
//! them consume a history window of m values and emit n future values.

mod latent;
mod sarima;

pub use latent::{fit_latent_ode, LatentFit, LatentOdeModel, LatentOpts, LATENT_DIM};
pub use sarima::{
    fit_sarima, sarima_forecast, SarimaForecaster, SeasonalArimaModel, SEASONAL_PERIOD,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::{
    train, Activation, GradModel, LstmLayer, Mlp, Optimizer, TrainOptions,
};
use crate::series::WindowPair;

/// A fitted model that maps a fixed-length history to a fixed-length
/// forecast.
pub trait Forecaster {
    fn history_len(&self) -> usize;
    fn horizon(&self) -> usize;
    fn predict(&self, history: &[f64]) -> Result<Vec<f64>>;
}

fn check_history(len: usize, expected: usize) -> Result<()> {
    if len != expected {
        return Err(Error::DimensionMismatch { expected, got: len });
    }
    Ok(())
}

/// Returns its input unchanged; only defined for m = n.
#[derive(Debug, Clone, Copy)]
pub struct Repeater {
    m: usize,
}

impl Repeater {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m != n {
            return Err(Error::InvalidParameter {
                name: "repeater".into(),
                reason: format!("history and horizon must match, got m={m}, n={n}"),
            });
        }
        if m == 0 {
            return Err(Error::TooShort { required: 1, actual: 0 });
        }
        Ok(Self { m })
    }
}

impl Forecaster for Repeater {
    fn history_len(&self) -> usize {
        self.m
    }

    fn horizon(&self) -> usize {
        self.m
    }

    fn predict(&self, history: &[f64]) -> Result<Vec<f64>> {
        check_history(history.len(), self.m)?;
        Ok(history.to_vec())
    }
}

/// Shared training knobs for the window-to-window nets.
#[derive(Debug, Clone, Copy)]
pub struct NetFitOpts {
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub lr: f64,
}

impl Default for NetFitOpts {
    fn default() -> Self {
        Self { epochs: 200, batch_size: 32, seed: 0, lr: 1e-3 }
    }
}

fn validate_windows(windows: &[WindowPair], m: usize, n: usize) -> Result<()> {
    if windows.is_empty() {
        return Err(Error::TooShort { required: 1, actual: 0 });
    }
    for w in windows {
        if w.history.len() != m {
            return Err(Error::LengthMismatch { left: m, right: w.history.len() });
        }
        if w.target.len() != n {
            return Err(Error::LengthMismatch { left: n, right: w.target.len() });
        }
    }
    Ok(())
}

/// One 128-unit hidden layer from history to forecast.
#[derive(Debug, Clone)]
pub struct FcnnForecaster {
    net: Mlp,
    m: usize,
    n: usize,
}

pub fn fit_fcnn(
    windows: &[WindowPair],
    m: usize,
    n: usize,
    opts: &NetFitOpts,
) -> Result<FcnnForecaster> {
    validate_windows(windows, m, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut net = Mlp::glorot(&[m, 128, n], &[Activation::Relu, Activation::Identity], &mut rng)?;
    let data: Vec<(Vec<f64>, Vec<f64>)> =
        windows.iter().map(|w| (w.history.clone(), w.target.clone())).collect();
    let mut optimizer = Optimizer::adam(opts.lr, net.num_params());
    let train_opts =
        TrainOptions { epochs: opts.epochs, batch_size: opts.batch_size, seed: opts.seed };
    train(&mut net, &data, &mut optimizer, &train_opts)?;
    Ok(FcnnForecaster { net, m, n })
}

impl Forecaster for FcnnForecaster {
    fn history_len(&self) -> usize {
        self.m
    }

    fn horizon(&self) -> usize {
        self.n
    }

    fn predict(&self, history: &[f64]) -> Result<Vec<f64>> {
        check_history(history.len(), self.m)?;
        self.net.forward(history)
    }
}

/// 32-unit LSTM over the history, read out from the final hidden state
/// through a 128-unit dense layer.
#[derive(Debug, Clone)]
pub struct LstmForecaster {
    cell: LstmLayer,
    head: Mlp,
    m: usize,
    n: usize,
}

const LSTM_UNITS: usize = 32;

impl LstmForecaster {
    fn sequence(history: &[f64]) -> Vec<Vec<f64>> {
        history.iter().map(|&v| vec![v]).collect()
    }
}

impl GradModel for LstmForecaster {
    fn num_params(&self) -> usize {
        self.cell.num_params() + self.head.num_params()
    }

    fn params(&self) -> Vec<f64> {
        let mut p = self.cell.params();
        p.extend(self.head.params());
        p
    }

    fn set_params(&mut self, p: &[f64]) -> Result<()> {
        let split = self.cell.num_params();
        if p.len() != split + self.head.num_params() {
            return Err(Error::LengthMismatch {
                left: split + self.head.num_params(),
                right: p.len(),
            });
        }
        self.cell.set_params(&p[..split])?;
        self.head.set_params(&p[split..])
    }

    fn loss_grad(&self, input: &[f64], target: &[f64], grad: &mut [f64]) -> Result<f64> {
        let xs = Self::sequence(input);
        let (_, last) = self.cell.forward(&xs)?;
        let out = self.head.forward(&last)?;
        if out.len() != target.len() {
            return Err(Error::LengthMismatch { left: out.len(), right: target.len() });
        }
        let n = out.len() as f64;
        let upstream: Vec<f64> =
            out.iter().zip(target).map(|(o, t)| 2.0 * (o - t) / n).collect();
        let (head_g, d_last) = self.head.backward(&last, &upstream)?;
        let cell_g = self.cell.backward(&xs, &d_last)?;
        let split = self.cell.num_params();
        for (acc, g) in grad[..split].iter_mut().zip(cell_g) {
            *acc += g;
        }
        for (acc, g) in grad[split..].iter_mut().zip(head_g) {
            *acc += g;
        }
        Ok(out.iter().zip(target).map(|(o, t)| (o - t).powi(2)).sum::<f64>() / n)
    }
}

pub fn fit_lstm(
    windows: &[WindowPair],
    m: usize,
    n: usize,
    opts: &NetFitOpts,
) -> Result<LstmForecaster> {
    validate_windows(windows, m, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let cell = LstmLayer::glorot(1, LSTM_UNITS, &mut rng);
    let head = Mlp::glorot(
        &[LSTM_UNITS, 128, n],
        &[Activation::Relu, Activation::Identity],
        &mut rng,
    )?;
    let mut model = LstmForecaster { cell, head, m, n };
    let data: Vec<(Vec<f64>, Vec<f64>)> =
        windows.iter().map(|w| (w.history.clone(), w.target.clone())).collect();
    let mut optimizer = Optimizer::adam(opts.lr, model.num_params());
    let train_opts =
        TrainOptions { epochs: opts.epochs, batch_size: opts.batch_size, seed: opts.seed };
    train(&mut model, &data, &mut optimizer, &train_opts)?;
    Ok(model)
}

impl Forecaster for LstmForecaster {
    fn history_len(&self) -> usize {
        self.m
    }

    fn horizon(&self) -> usize {
        self.n
    }

    fn predict(&self, history: &[f64]) -> Result<Vec<f64>> {
        check_history(history.len(), self.m)?;
        let (_, last) = self.cell.forward(&Self::sequence(history))?;
        self.head.forward(&last)
    }
}
