//! Time-series forecasting built around linear ODE systems.
//!
//! The crate combines a small neural-network engine, a fixed-step ODE solver
//! with reverse-mode gradients, a trainable linear ODE system with eigenvalue
//! spectrum reporting, a closed-form solution regression model, classical
//! forecasting baselines, and a benchmark harness that compares all of them
//! on seeded data grids.

pub mod baselines;
pub mod bench;
pub mod closedform;
pub mod error;
pub mod linode;
pub mod mat;
pub mod neldermead;
pub mod nn;
pub mod ode;
pub mod series;

pub use error::{Error, Result};
