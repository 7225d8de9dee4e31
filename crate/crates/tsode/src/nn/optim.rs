//! Parameter-update rules over flat gradient vectors.

/// SGD or Adam. Adam keeps per-parameter moment estimates and a step counter;
/// moment vectors always match the parameter vector length.
#[derive(Debug, Clone, PartialEq)]
pub enum Optimizer {
    Sgd {
        lr: f64,
    },
    Adam {
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
        m: Vec<f64>,
        v: Vec<f64>,
        step: u64,
    },
}

impl Optimizer {
    pub fn sgd(lr: f64) -> Self {
        Optimizer::Sgd { lr }
    }

    /// Adam with the usual defaults: β₁=0.9, β₂=0.999, ε=1e-8.
    pub fn adam(lr: f64, num_params: usize) -> Self {
        Optimizer::Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
            step: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        assert_eq!(params.len(), grads.len(), "gradient shape mismatch");
        match self {
            Optimizer::Sgd { lr } => {
                for (p, g) in params.iter_mut().zip(grads) {
                    *p -= *lr * g;
                }
            }
            Optimizer::Adam { lr, beta1, beta2, eps, m, v, step } => {
                assert_eq!(params.len(), m.len(), "optimizer state shape mismatch");
                *step += 1;
                let bc1 = 1.0 - beta1.powi(*step as i32);
                let bc2 = 1.0 - beta2.powi(*step as i32);
                for k in 0..params.len() {
                    m[k] = *beta1 * m[k] + (1.0 - *beta1) * grads[k];
                    v[k] = *beta2 * v[k] + (1.0 - *beta2) * grads[k] * grads[k];
                    let m_hat = m[k] / bc1;
                    let v_hat = v[k] / bc2;
                    params[k] -= *lr * m_hat / (v_hat.sqrt() + *eps);
                }
            }
        }
    }
}
