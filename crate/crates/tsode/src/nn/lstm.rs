//! Single LSTM layer with sigmoid gates and tanh cell activation, plus
//! backpropagation through time for a loss on the final hidden state.

use rand::Rng;

use crate::error::{Error, Result};
use crate::mat::Mat;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Per-timestep quantities recorded by the forward pass.
struct StepCache {
    concat: Vec<f64>,
    i: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    o: Vec<f64>,
    c: Vec<f64>,
    c_prev: Vec<f64>,
}

/// LSTM layer over inputs of dimension `input_dim` with `units` hidden units.
/// Each gate weight matrix acts on the concatenation [x_t, h_{t-1}].
#[derive(Debug, Clone, PartialEq)]
pub struct LstmLayer {
    input_dim: usize,
    units: usize,
    w_i: Mat,
    b_i: Vec<f64>,
    w_f: Mat,
    b_f: Vec<f64>,
    w_g: Mat,
    b_g: Vec<f64>,
    w_o: Mat,
    b_o: Vec<f64>,
}

impl LstmLayer {
    pub fn zeros(input_dim: usize, units: usize) -> Self {
        let w = || Mat::zeros(units, input_dim + units);
        let b = || vec![0.0; units];
        Self {
            input_dim,
            units,
            w_i: w(),
            b_i: b(),
            w_f: w(),
            b_f: b(),
            w_g: w(),
            b_g: b(),
            w_o: w(),
            b_o: b(),
        }
    }

    pub fn glorot<R: Rng>(input_dim: usize, units: usize, rng: &mut R) -> Self {
        let mut layer = Self::zeros(input_dim, units);
        let limit = (6.0 / (input_dim + 2 * units) as f64).sqrt();
        for w in [&mut layer.w_i, &mut layer.w_f, &mut layer.w_g, &mut layer.w_o] {
            for v in w.data_mut() {
                *v = rng.gen_range(-limit..limit);
            }
        }
        layer
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn units(&self) -> usize {
        self.units
    }

    pub fn num_params(&self) -> usize {
        4 * (self.units * (self.input_dim + self.units) + self.units)
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.num_params());
        for (w, b) in [
            (&self.w_i, &self.b_i),
            (&self.w_f, &self.b_f),
            (&self.w_g, &self.b_g),
            (&self.w_o, &self.b_o),
        ] {
            p.extend_from_slice(w.data());
            p.extend_from_slice(b);
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
        for (w, b) in [
            (&mut self.w_i, &mut self.b_i),
            (&mut self.w_f, &mut self.b_f),
            (&mut self.w_g, &mut self.b_g),
            (&mut self.w_o, &mut self.b_o),
        ] {
            let nw = w.data().len();
            w.data_mut().copy_from_slice(&p[at..at + nw]);
            at += nw;
            let nb = b.len();
            b.copy_from_slice(&p[at..at + nb]);
            at += nb;
        }
        Ok(())
    }

    fn run(&self, xs: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Vec<StepCache>)> {
        let mut h = vec![0.0; self.units];
        let mut c = vec![0.0; self.units];
        let mut hiddens = Vec::with_capacity(xs.len());
        let mut caches = Vec::with_capacity(xs.len());

        for x in xs {
            if x.len() != self.input_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.input_dim,
                    got: x.len(),
                });
            }
            let mut concat = Vec::with_capacity(self.input_dim + self.units);
            concat.extend_from_slice(x);
            concat.extend_from_slice(&h);

            let gate = |w: &Mat, b: &[f64], squash: fn(f64) -> f64| -> Vec<f64> {
                w.matvec(&concat)
                    .into_iter()
                    .zip(b)
                    .map(|(z, bi)| squash(z + bi))
                    .collect()
            };
            let i = gate(&self.w_i, &self.b_i, sigmoid);
            let f = gate(&self.w_f, &self.b_f, sigmoid);
            let g = gate(&self.w_g, &self.b_g, f64::tanh);
            let o = gate(&self.w_o, &self.b_o, sigmoid);

            let c_prev = c.clone();
            for k in 0..self.units {
                c[k] = f[k] * c_prev[k] + i[k] * g[k];
            }
            for k in 0..self.units {
                h[k] = o[k] * c[k].tanh();
            }
            hiddens.push(h.clone());
            caches.push(StepCache { concat, i, f, g, o, c: c.clone(), c_prev });
        }
        Ok((hiddens, caches))
    }

    /// Runs the recurrence over the sequence; returns every hidden state and
    /// the final one.
    pub fn forward(&self, xs: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        if xs.is_empty() {
            return Err(Error::TooShort { required: 1, actual: 0 });
        }
        let (hiddens, _) = self.run(xs)?;
        let last = hiddens.last().expect("non-empty").clone();
        Ok((hiddens, last))
    }

    /// Backpropagation through time for a scalar loss whose gradient at the
    /// final hidden state is `upstream`. Returns flat parameter gradients in
    /// the same layout as [`LstmLayer::params`].
    pub fn backward(&self, xs: &[Vec<f64>], upstream: &[f64]) -> Result<Vec<f64>> {
        if upstream.len() != self.units {
            return Err(Error::DimensionMismatch {
                expected: self.units,
                got: upstream.len(),
            });
        }
        let (_, caches) = self.run(xs)?;
        let span = self.units * (self.input_dim + self.units) + self.units;
        let mut grads = vec![0.0; 4 * span];

        let mut dh = upstream.to_vec();
        let mut dc = vec![0.0; self.units];
        for cache in caches.iter().rev() {
            let tanh_c: Vec<f64> = cache.c.iter().map(|v| v.tanh()).collect();
            // h = o ⊙ tanh(c)
            let d_o: Vec<f64> = dh.iter().zip(&tanh_c).map(|(d, t)| d * t).collect();
            for k in 0..self.units {
                dc[k] += dh[k] * cache.o[k] * (1.0 - tanh_c[k] * tanh_c[k]);
            }
            // c = f ⊙ c_prev + i ⊙ g
            let d_f: Vec<f64> = dc.iter().zip(&cache.c_prev).map(|(d, c)| d * c).collect();
            let d_i: Vec<f64> = dc.iter().zip(&cache.g).map(|(d, g)| d * g).collect();
            let d_g: Vec<f64> = dc.iter().zip(&cache.i).map(|(d, i)| d * i).collect();

            let mut d_concat = vec![0.0; self.input_dim + self.units];
            let gates: [(&Mat, &[f64], &[f64], usize); 4] = [
                (&self.w_i, &cache.i, &d_i, 0),
                (&self.w_f, &cache.f, &d_f, 1),
                (&self.w_g, &cache.g, &d_g, 2),
                (&self.w_o, &cache.o, &d_o, 3),
            ];
            for (w, act, d_act, slot) in gates {
                // sigmoid' = y(1−y); tanh' = 1−y²
                let dz: Vec<f64> = d_act
                    .iter()
                    .zip(act)
                    .map(|(d, y)| if slot == 2 { d * (1.0 - y * y) } else { d * y * (1.0 - y) })
                    .collect();
                let base = slot * span;
                let width = self.input_dim + self.units;
                for k in 0..self.units {
                    let row = base + k * width;
                    for j in 0..width {
                        grads[row + j] += dz[k] * cache.concat[j];
                    }
                    grads[base + self.units * width + k] += dz[k];
                }
                let dd = w.matvec_t(&dz);
                for (a, b) in d_concat.iter_mut().zip(dd) {
                    *a += b;
                }
            }

            dh.copy_from_slice(&d_concat[self.input_dim..]);
            for (dck, &fk) in dc.iter_mut().zip(&cache.f) {
                *dck *= fk;
            }
        }
        Ok(grads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{finite_difference_grad, max_rel_err};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_sequence(len: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect()
    }

    #[test]
    fn zero_weights_give_zero_final_hidden() {
        let layer = LstmLayer::zeros(3, 5);
        let (_, last) = layer.forward(&toy_sequence(4, 3, 0)).unwrap();
        assert_eq!(last, vec![0.0; 5]);
    }

    #[test]
    fn parameter_count_matches_formula() {
        let layer = LstmLayer::zeros(1, 32);
        assert_eq!(layer.num_params(), 4_352);
        assert_eq!(layer.params().len(), 4_352);
    }

    #[test]
    fn length_one_sequence_equals_single_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let layer = LstmLayer::glorot(2, 3, &mut rng);
        let xs = toy_sequence(1, 2, 1);
        let (hiddens, last) = layer.forward(&xs).unwrap();
        assert_eq!(hiddens.len(), 1);
        assert_eq!(hiddens[0], last);

        let longer = [xs[0].clone(), xs[0].clone()];
        let (two, _) = layer.forward(&longer).unwrap();
        assert_eq!(two[0], last);
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let layer = LstmLayer::glorot(2, 4, &mut rng);
        let grads = layer.backward(&toy_sequence(5, 2, 2), &[0.0; 4]).unwrap();
        assert!(grads.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut layer = LstmLayer::glorot(2, 4, &mut rng);
        let xs = toy_sequence(5, 2, 3);
        let upstream: Vec<f64> = (0..4).map(|k| 0.5 - 0.3 * k as f64).collect();

        let analytic = layer.backward(&xs, &upstream).unwrap();
        let params = layer.params();
        let numeric = finite_difference_grad(&params, |p| {
            layer.set_params(p).unwrap();
            let (_, last) = layer.forward(&xs).unwrap();
            last.iter().zip(&upstream).map(|(h, u)| h * u).sum()
        });
        layer.set_params(&params).unwrap();
        let err = max_rel_err(&analytic, &numeric);
        assert!(err <= 1e-4, "max relative error {err}");
    }

    #[test]
    fn single_step_gradient_matches_hand_derivation() {
        // Scalar case, h_prev = c_prev = 0: h = σ(z_o)·tanh(σ(z_i)·tanh(z_g))
        // with z = w_x·x + b per gate, so every partial is explicit.
        let mut layer = LstmLayer::zeros(1, 1);
        let p = [
            0.7, 0.2, 0.1, // w_xi, w_hi, b_i
            -0.4, 0.3, 0.2, // forget gate (inert at c_prev = 0)
            0.5, -0.1, -0.3, // w_xg, w_hg, b_g
            0.9, 0.4, 0.05, // w_xo, w_ho, b_o
        ];
        layer.set_params(&p).unwrap();
        let x = 0.8;
        let grads = layer.backward(&[vec![x]], &[1.0]).unwrap();

        let s = |z: f64| 1.0 / (1.0 + (-z).exp());
        let (z_i, z_g, z_o) = (p[0] * x + p[2], p[6] * x + p[8], p[9] * x + p[11]);
        let (i, g, o) = (s(z_i), z_g.tanh(), s(z_o));
        let c = i * g;
        let dtanh_c = 1.0 - c.tanh() * c.tanh();

        let dh_dzi = o * dtanh_c * g * i * (1.0 - i);
        let dh_dzg = o * dtanh_c * i * (1.0 - g * g);
        let dh_dzo = c.tanh() * o * (1.0 - o);

        let expected = [
            dh_dzi * x, 0.0, dh_dzi, // input gate: w_x, w_h (h_prev=0), b
            0.0, 0.0, 0.0, // forget gate never fires at c_prev = 0
            dh_dzg * x, 0.0, dh_dzg,
            dh_dzo * x, 0.0, dh_dzo,
        ];
        for (got, want) in grads.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
    }
}
