//! Latent ODE forecaster: an encoder compresses the history window into a
//! latent state, a learned vector field evolves it forward, and a linear
//! readout decodes one value per grid point. All three parts train jointly
//! by backpropagating the forecast error through the unrolled solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::{Activation, Mlp, Optimizer};
use crate::ode::{grad_through_solver, integrate, VectorField};
use crate::series::WindowPair;

use super::{check_history, validate_windows, Forecaster};

pub const LATENT_DIM: usize = 15;

const ENCODER_HIDDEN: usize = 64;
const FIELD_HIDDEN: usize = 32;
const MAX_ITERS: usize = 9000;

#[derive(Debug, Clone)]
pub struct LatentOdeModel {
    encoder: Mlp,
    field: VectorField,
    dec_w: Vec<f64>,
    dec_b: f64,
    m: usize,
    n: usize,
    dt: f64,
    substeps: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LatentOpts {
    pub iters: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub lr: f64,
    pub substeps: usize,
}

impl Default for LatentOpts {
    fn default() -> Self {
        Self { iters: 500, batch_size: 8, seed: 0, lr: 1e-3, substeps: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct LatentFit {
    pub model: LatentOdeModel,
    pub loss_history: Vec<f64>,
    /// Iteration at which integration blew up, if training halted early.
    pub blow_up: Option<usize>,
}

impl LatentOdeModel {
    fn init(m: usize, n: usize, dt: f64, substeps: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let encoder = Mlp::glorot(
            &[m, ENCODER_HIDDEN, LATENT_DIM],
            &[Activation::Tanh, Activation::Identity],
            &mut rng,
        )?;
        let field_net = Mlp::glorot(
            &[LATENT_DIM, FIELD_HIDDEN, LATENT_DIM],
            &[Activation::Tanh, Activation::Identity],
            &mut rng,
        )?;
        let field = VectorField::mlp(field_net)?;
        let dec_w: Vec<f64> = (0..LATENT_DIM).map(|_| rng.gen_range(-0.25..0.25)).collect();
        Ok(Self { encoder, field, dec_w, dec_b: 0.0, m, n, dt, substeps })
    }

    fn num_params(&self) -> usize {
        self.encoder.num_params() + self.field.num_params() + LATENT_DIM + 1
    }

    fn params(&self) -> Vec<f64> {
        let mut p = self.encoder.params();
        p.extend(self.field.params());
        p.extend(&self.dec_w);
        p.push(self.dec_b);
        p
    }

    fn set_params(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.num_params() {
            return Err(Error::LengthMismatch { left: self.num_params(), right: p.len() });
        }
        let e = self.encoder.num_params();
        let f = self.field.num_params();
        self.encoder.set_params(&p[..e])?;
        self.field.set_params(&p[e..e + f])?;
        self.dec_w.copy_from_slice(&p[e + f..e + f + LATENT_DIM]);
        self.dec_b = p[e + f + LATENT_DIM];
        Ok(())
    }

    fn decode(&self, z: &[f64]) -> f64 {
        self.dec_w.iter().zip(z).map(|(w, zi)| w * zi).sum::<f64>() + self.dec_b
    }

    fn latent_path(&self, history: &[f64]) -> Result<Vec<Vec<f64>>> {
        let z0 = self.encoder.forward(history)?;
        let traj = integrate(&self.field, &z0, 0.0, self.dt, self.n + 1, self.substeps)?;
        Ok(traj.states)
    }

    /// Squared forecast error of one window, with gradients accumulated into
    /// the caller's buffers.
    fn window_loss_grad(
        &self,
        w: &WindowPair,
        g_enc: &mut [f64],
        g_field: &mut [f64],
        g_w: &mut [f64],
        g_b: &mut f64,
    ) -> Result<f64> {
        let z0 = self.encoder.forward(&w.history)?;
        let n = w.target.len();
        let traj = integrate(&self.field, &z0, 0.0, self.dt, n + 1, self.substeps)?;
        let nf = n as f64;
        let mut state_grads = vec![vec![0.0; LATENT_DIM]; n + 1];
        let mut loss = 0.0;
        for j in 0..n {
            let z = &traj.states[j + 1];
            let e = self.decode(z) - w.target[j];
            loss += e * e;
            let gy = 2.0 * e / nf;
            for ((acc, sg), (wi, zi)) in g_w
                .iter_mut()
                .zip(&mut state_grads[j + 1])
                .zip(self.dec_w.iter().zip(z))
            {
                *acc += gy * zi;
                *sg = gy * wi;
            }
            *g_b += gy;
        }
        let (d_field, d_z0) =
            grad_through_solver(&self.field, &z0, 0.0, self.dt, self.substeps, &state_grads)?;
        for (acc, g) in g_field.iter_mut().zip(d_field) {
            *acc += g;
        }
        let (d_enc, _) = self.encoder.backward(&w.history, &d_z0)?;
        for (acc, g) in g_enc.iter_mut().zip(d_enc) {
            *acc += g;
        }
        Ok(loss / nf)
    }
}

impl Forecaster for LatentOdeModel {
    fn history_len(&self) -> usize {
        self.m
    }

    fn horizon(&self) -> usize {
        self.n
    }

    fn predict(&self, history: &[f64]) -> Result<Vec<f64>> {
        check_history(history.len(), self.m)?;
        let path = self.latent_path(history)?;
        Ok(path[1..].iter().map(|z| self.decode(z)).collect())
    }
}

/// Minimizes forecast MSE over randomly drawn windows. A solver blow-up
/// stops training and returns the parameters from the last completed
/// iteration instead of failing.
pub fn fit_latent_ode(
    windows: &[WindowPair],
    m: usize,
    n: usize,
    dt: f64,
    opts: &LatentOpts,
) -> Result<LatentFit> {
    validate_windows(windows, m, n)?;
    if opts.iters > MAX_ITERS {
        return Err(Error::InvalidParameter {
            name: "iters".into(),
            reason: format!("must be at most {MAX_ITERS}, got {}", opts.iters),
        });
    }
    if opts.batch_size == 0
        || opts.substeps == 0
        || !opts.lr.is_finite()
        || opts.lr <= 0.0
        || !dt.is_finite()
        || dt <= 0.0
    {
        return Err(Error::InvalidParameter {
            name: "latent training".into(),
            reason: format!(
                "batch_size={}, substeps={}, lr={}, dt={dt}",
                opts.batch_size, opts.substeps, opts.lr
            ),
        });
    }

    let mut model = LatentOdeModel::init(m, n, dt, opts.substeps, opts.seed)?;
    let mut params = model.params();
    let mut optimizer = Optimizer::adam(opts.lr, params.len());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(1));
    let mut loss_history = Vec::with_capacity(opts.iters);

    let e = model.encoder.num_params();
    let f = model.field.num_params();
    for iter in 0..opts.iters {
        let mut grad = vec![0.0; params.len()];
        let mut batch_loss = 0.0;
        let mut halted = false;
        for _ in 0..opts.batch_size {
            let w = &windows[rng.gen_range(0..windows.len())];
            let (head, tail) = grad.split_at_mut(e + f);
            let (g_enc, g_field) = head.split_at_mut(e);
            let (g_w, g_b) = tail.split_at_mut(LATENT_DIM);
            match model.window_loss_grad(w, g_enc, g_field, g_w, &mut g_b[0]) {
                Ok(loss) => batch_loss += loss,
                Err(Error::BlowUp { .. }) => {
                    halted = true;
                    break;
                }
                Err(err) => return Err(err),
            }
        }
        if halted || !batch_loss.is_finite() {
            return Ok(LatentFit { model, loss_history, blow_up: Some(iter) });
        }
        let scale = 1.0 / opts.batch_size as f64;
        for g in &mut grad {
            *g *= scale;
        }
        optimizer.step(&mut params, &grad);
        model.set_params(&params)?;
        loss_history.push(batch_loss * scale);
    }

    Ok(LatentFit { model, loss_history, blow_up: None })
}
