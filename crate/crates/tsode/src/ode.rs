//! Fixed-step RK4 integration of vector fields and reverse-mode gradients
//! through the unrolled solver steps.
//!
//! Gradients are exact for the discretized trajectory (backprop through every
//! RK4 stage), not an approximation of the continuous adjoint.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::nn::Mlp;
use crate::series::VectorSeries;

/// Integrated trajectory on a uniform time grid.
pub type Trajectory = VectorSeries;

/// Norm threshold past which an integration is reported as a blow-up.
pub const BLOW_UP_NORM: f64 = 1e12;

/// Autonomous vector field x' = f(x): either a linear map or a small network
/// with matching input/output dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorField {
    Linear(Mat),
    Mlp(Mlp),
}

impl VectorField {
    pub fn linear(a: Mat) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::DimensionMismatch { expected: a.rows(), got: a.cols() });
        }
        if !a.is_finite() {
            return Err(Error::InvalidParameter {
                name: "A".into(),
                reason: "matrix entries must be finite".into(),
            });
        }
        Ok(VectorField::Linear(a))
    }

    pub fn mlp(net: Mlp) -> Result<Self> {
        if net.in_dim() != net.out_dim() {
            return Err(Error::DimensionMismatch {
                expected: net.in_dim(),
                got: net.out_dim(),
            });
        }
        Ok(VectorField::Mlp(net))
    }

    pub fn dim(&self) -> usize {
        match self {
            VectorField::Linear(a) => a.rows(),
            VectorField::Mlp(net) => net.in_dim(),
        }
    }

    pub fn num_params(&self) -> usize {
        match self {
            VectorField::Linear(a) => a.rows() * a.cols(),
            VectorField::Mlp(net) => net.num_params(),
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            VectorField::Linear(a) => a.data().to_vec(),
            VectorField::Mlp(net) => net.params(),
        }
    }

    pub fn set_params(&mut self, p: &[f64]) -> Result<()> {
        match self {
            VectorField::Linear(a) => {
                if p.len() != a.data().len() {
                    return Err(Error::DimensionMismatch {
                        expected: a.data().len(),
                        got: p.len(),
                    });
                }
                a.data_mut().copy_from_slice(p);
                Ok(())
            }
            VectorField::Mlp(net) => net.set_params(p),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        match self {
            VectorField::Linear(a) => Ok(a.matvec(x)),
            VectorField::Mlp(net) => net.forward(x),
        }
    }

    /// Vector-Jacobian products at `x` for cotangent `v` on f(x): adds
    /// (∂f/∂θ)ᵀv into `dtheta` and returns (∂f/∂x)ᵀv.
    fn vjp(&self, x: &[f64], v: &[f64], dtheta: &mut [f64]) -> Result<Vec<f64>> {
        match self {
            VectorField::Linear(a) => {
                let d = a.rows();
                for i in 0..d {
                    for j in 0..d {
                        dtheta[i * d + j] += v[i] * x[j];
                    }
                }
                Ok(a.matvec_t(v))
            }
            VectorField::Mlp(net) => {
                let (g, dx) = net.backward(x, v)?;
                for (acc, gi) in dtheta.iter_mut().zip(g) {
                    *acc += gi;
                }
                Ok(dx)
            }
        }
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// One classical 4-stage Runge-Kutta step from `x` at time `t` with step `h`.
pub fn rk4_step(f: &VectorField, x: &[f64], t: f64, h: f64) -> Result<Vec<f64>> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "h".into(),
            reason: format!("step must be positive, got {h}"),
        });
    }
    let k1 = f.eval(x)?;
    let mut u = x.to_vec();
    axpy(&mut u, h / 2.0, &k1);
    let k2 = f.eval(&u)?;
    u.copy_from_slice(x);
    axpy(&mut u, h / 2.0, &k2);
    let k3 = f.eval(&u)?;
    u.copy_from_slice(x);
    axpy(&mut u, h, &k3);
    let k4 = f.eval(&u)?;

    let mut y = x.to_vec();
    for i in 0..y.len() {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::BlowUp { time: t + h, norm: f64::INFINITY });
    }
    Ok(y)
}

/// Integrates x' = f(x) from `x0`, sampling `n_points` states at spacing `dt`
/// starting with the initial state itself. Each grid interval is covered by
/// `substeps` RK4 steps of size dt/substeps.
pub fn integrate(
    f: &VectorField,
    x0: &[f64],
    t0: f64,
    dt: f64,
    n_points: usize,
    substeps: usize,
) -> Result<Trajectory> {
    let states = integrate_dense(f, x0, t0, dt, n_points, substeps)?
        .into_iter()
        .step_by(substeps.max(1))
        .collect();
    Ok(Trajectory { t0, dt, states })
}

/// Forward pass retaining every substep state; index k holds the state after
/// k substeps, so grid point i sits at index i·substeps.
fn integrate_dense(
    f: &VectorField,
    x0: &[f64],
    t0: f64,
    dt: f64,
    n_points: usize,
    substeps: usize,
) -> Result<Vec<Vec<f64>>> {
    if x0.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x0.len() });
    }
    if !dt.is_finite() || dt <= 0.0 || substeps == 0 || n_points == 0 {
        return Err(Error::InvalidParameter {
            name: "grid".into(),
            reason: format!("dt={dt}, n_points={n_points}, substeps={substeps}"),
        });
    }
    let h = dt / substeps as f64;
    let total = (n_points - 1) * substeps;
    let mut states = Vec::with_capacity(total + 1);
    states.push(x0.to_vec());
    for k in 0..total {
        let t = t0 + k as f64 * h;
        let next = rk4_step(f, states.last().expect("non-empty"), t, h)?;
        let n = norm(&next);
        if n > BLOW_UP_NORM {
            return Err(Error::BlowUp { time: t + h, norm: n });
        }
        states.push(next);
    }
    Ok(states)
}

/// Reverse-mode VJP through one RK4 step: given the cotangent of the step
/// output, accumulates parameter gradients and returns the cotangent of the
/// step input.
fn rk4_step_vjp(
    f: &VectorField,
    x: &[f64],
    h: f64,
    bar_y: &[f64],
    dtheta: &mut [f64],
) -> Result<Vec<f64>> {
    let k1 = f.eval(x)?;
    let mut u2 = x.to_vec();
    axpy(&mut u2, h / 2.0, &k1);
    let k2 = f.eval(&u2)?;
    let mut u3 = x.to_vec();
    axpy(&mut u3, h / 2.0, &k2);
    let k3 = f.eval(&u3)?;
    let mut u4 = x.to_vec();
    axpy(&mut u4, h, &k3);

    let scale = |v: &[f64], s: f64| -> Vec<f64> { v.iter().map(|x| x * s).collect() };

    let bar_k4 = scale(bar_y, h / 6.0);
    let bar_u4 = f.vjp(&u4, &bar_k4, dtheta)?;

    let mut bar_k3 = scale(bar_y, h / 3.0);
    axpy(&mut bar_k3, h, &bar_u4);
    let bar_u3 = f.vjp(&u3, &bar_k3, dtheta)?;

    let mut bar_k2 = scale(bar_y, h / 3.0);
    axpy(&mut bar_k2, h / 2.0, &bar_u3);
    let bar_u2 = f.vjp(&u2, &bar_k2, dtheta)?;

    let mut bar_k1 = scale(bar_y, h / 6.0);
    axpy(&mut bar_k1, h / 2.0, &bar_u2);
    let bar_u1 = f.vjp(x, &bar_k1, dtheta)?;

    let mut bar_x = bar_y.to_vec();
    for u in [&bar_u1, &bar_u2, &bar_u3, &bar_u4] {
        axpy(&mut bar_x, 1.0, u);
    }
    Ok(bar_x)
}

/// Gradients of a trajectory loss through the unrolled solver.
///
/// `state_grads[i]` is ∂loss/∂x(tᵢ) for each of the `n_points` sampled states
/// (index 0 is the initial state). Returns (∂loss/∂θ, ∂loss/∂x0).
pub fn grad_through_solver(
    f: &VectorField,
    x0: &[f64],
    t0: f64,
    dt: f64,
    substeps: usize,
    state_grads: &[Vec<f64>],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n_points = state_grads.len();
    if n_points == 0 {
        return Err(Error::TooShort { required: 1, actual: 0 });
    }
    for g in state_grads {
        if g.len() != f.dim() {
            return Err(Error::DimensionMismatch { expected: f.dim(), got: g.len() });
        }
    }
    let dense = integrate_dense(f, x0, t0, dt, n_points, substeps)?;
    let h = dt / substeps as f64;

    let mut dtheta = vec![0.0; f.num_params()];
    let mut bar = state_grads[n_points - 1].clone();
    for k in (1..dense.len()).rev() {
        bar = rk4_step_vjp(f, &dense[k - 1], h, &bar, &mut dtheta)?;
        let below = k - 1;
        if below % substeps == 0 {
            let grid_idx = below / substeps;
            if grid_idx < n_points - 1 {
                axpy(&mut bar, 1.0, &state_grads[grid_idx]);
            }
        }
    }
    if dense.len() == 1 {
        // degenerate single-point grid: the only gradient is on x0 itself
        bar = state_grads[0].clone();
    }
    Ok((dtheta, bar))
}
