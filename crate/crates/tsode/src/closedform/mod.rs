//! Direct fitting of the closed-form solution of a linear ODE system.
//!
//! Instead of learning a dynamics matrix and integrating it, fit
//!
//!   X(t) = Σₖ C_{2k-1}·e^{αₖτ}(cos βₖτ − sin βₖτ)
//!        + C_{2k} ·e^{αₖτ}(cos βₖτ + sin βₖτ),   τ = t − t₀
//!
//! straight to the data: frequencies start from the periodogram, amplitudes
//! from least squares, and a derivative-free simplex search refines
//! everything. A model with K modes carries 3K+1 scalars, against (2K)²
//! entries for an equivalent dynamics matrix.

mod encoder;

pub use encoder::{forecast, train_encoder, EncoderFit, EncoderModel, EncoderTrainOpts};

use std::path::Path;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{least_squares, Mat};
use crate::neldermead::{self, Options as NmOptions};
use crate::series::TimeSeries;

/// Sum of exponentially damped sinusoid pairs with a shared time shift.
/// Mode k contributes the two Eq-style basis functions above; betas are kept
/// sorted ascending with their amplitude pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormModel {
    #[serde(rename = "K")]
    pub k: usize,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    pub t0: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub encoder_checkpoint: Option<String>,
}

impl ClosedFormModel {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>, c: Vec<f64>, t0: f64) -> Result<Self> {
        let k = betas.len();
        if k == 0 {
            return Err(Error::TooShort { required: 1, actual: 0 });
        }
        if alphas.len() != k {
            return Err(Error::LengthMismatch { left: k, right: alphas.len() });
        }
        if c.len() != 2 * k {
            return Err(Error::LengthMismatch { left: 2 * k, right: c.len() });
        }
        let finite = alphas.iter().chain(&betas).chain(&c).all(|v| v.is_finite());
        if !finite || !t0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "model".into(),
                reason: "parameters must be finite".into(),
            });
        }
        if betas.iter().any(|&b| b < 0.0) {
            return Err(Error::InvalidParameter {
                name: "betas".into(),
                reason: "angular frequencies must be non-negative".into(),
            });
        }

        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| betas[a].total_cmp(&betas[b]));
        let alphas = order.iter().map(|&i| alphas[i]).collect();
        let sorted_betas = order.iter().map(|&i| betas[i]).collect();
        let c = order.iter().flat_map(|&i| [c[2 * i], c[2 * i + 1]]).collect();
        Ok(Self {
            k,
            alphas,
            betas: sorted_betas,
            c,
            t0,
            encoder_checkpoint: None,
        })
    }

    /// Evaluates the model on a time grid.
    pub fn evaluate(&self, t_grid: &[f64]) -> Result<Vec<f64>> {
        t_grid
            .iter()
            .map(|&t| eval_point(&self.alphas, &self.betas, &self.c, self.t0, t))
            .collect()
    }

    /// Scalars a simplex search over this model moves: K betas, 2K
    /// amplitudes, one shift (plus K alphas when freed).
    pub fn search_dim(k: usize, free_alphas: bool) -> usize {
        if free_alphas {
            4 * k + 1
        } else {
            3 * k + 1
        }
    }
}

/// One point of the modal sum. Errs when a growing exponent passes e^700,
/// rather than silently returning inf.
fn eval_point(alphas: &[f64], betas: &[f64], c: &[f64], t0: f64, t: f64) -> Result<f64> {
    let tau = t - t0;
    let mut sum = 0.0;
    for ((&a, &b), pair) in alphas.iter().zip(betas).zip(c.chunks_exact(2)) {
        let exponent = a * tau;
        if exponent > 700.0 {
            return Err(Error::Overflow { exponent });
        }
        let amp = exponent.exp();
        let (s, co) = (b * tau).sin_cos();
        sum += amp * (pair[0] * (co - s) + pair[1] * (co + s));
    }
    Ok(sum)
}

/// Periodogram frequency estimates; `low_confidence` marks peaks that barely
/// clear the surrounding spectrum, as happens on noise.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyEstimate {
    /// Angular frequencies, ascending.
    pub betas: Vec<f64>,
    pub low_confidence: bool,
}

/// A selected peak this far above the median bin power counts as confident.
/// White noise tops out around 6-8x its median bin, genuine tones far higher.
const CONFIDENT_PEAK_FACTOR: f64 = 10.0;

/// Peaks below this fraction of the strongest bin are treated as numerical
/// dust, not candidate tones.
const PEAK_FLOOR: f64 = 1e-9;

/// Picks the `k` strongest periodogram peaks (excluding the zero bin) and
/// returns their angular frequencies, ascending. Bin spacing is 2π/(n·dt).
pub fn estimate_frequencies(values: &[f64], dt: f64, k: usize) -> Result<FrequencyEstimate> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "k".into(),
            reason: "need at least one mode".into(),
        });
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "dt".into(),
            reason: format!("grid spacing must be positive, got {dt}"),
        });
    }
    let n = values.len();
    if n < 4 * k {
        return Err(Error::TooShort { required: 4 * k, actual: n });
    }

    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let power: Vec<f64> = buf.iter().map(|z| z.norm_sqr()).collect();

    let half = n / 2;
    let top = power[1..half].iter().cloned().fold(0.0, f64::max);
    if top <= 0.0 {
        return Err(Error::TooFewPeaks { found: 0, needed: k });
    }
    let floor = PEAK_FLOOR * top;

    let mut peaks: Vec<(usize, f64)> = (1..half)
        .filter(|&i| power[i] >= power[i - 1] && power[i] >= power[i + 1] && power[i] > floor)
        .map(|i| (i, power[i]))
        .collect();
    if peaks.len() < k {
        return Err(Error::TooFewPeaks { found: peaks.len(), needed: k });
    }
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    peaks.truncate(k);

    let mut median_buf: Vec<f64> = power[1..half].to_vec();
    median_buf.sort_by(f64::total_cmp);
    let median = median_buf[median_buf.len() / 2];
    let weakest = peaks.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let low_confidence = weakest < CONFIDENT_PEAK_FACTOR * median;

    let scale = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    let mut betas: Vec<f64> = peaks.iter().map(|&(i, _)| i as f64 * scale).collect();
    betas.sort_by(f64::total_cmp);
    Ok(FrequencyEstimate { betas, low_confidence })
}

/// Least-squares amplitudes for fixed (alphas, betas, t0) against `y`:
/// the model is linear in C once the mode shapes are pinned.
pub fn ls_amplitudes(
    alphas: &[f64],
    betas: &[f64],
    t0: f64,
    times: &[f64],
    y: &[f64],
) -> Result<Vec<f64>> {
    if times.len() != y.len() {
        return Err(Error::LengthMismatch { left: times.len(), right: y.len() });
    }
    let k = betas.len();
    let mut basis = Mat::zeros(times.len(), 2 * k);
    for (row, &t) in times.iter().enumerate() {
        let tau = t - t0;
        for (j, (&a, &b)) in alphas.iter().zip(betas).enumerate() {
            let amp = (a * tau).exp();
            let (s, co) = (b * tau).sin_cos();
            basis[(row, 2 * j)] = amp * (co - s);
            basis[(row, 2 * j + 1)] = amp * (co + s);
        }
    }
    least_squares(&basis, y)
}

#[derive(Debug, Clone, Copy)]
pub struct FitOpts {
    pub seed: u64,
    /// Simplex restarts beyond the first run.
    pub restarts: usize,
    /// Objective evaluation budget per run.
    pub max_evals: usize,
    /// Also search the decay rates instead of pinning them at 0.
    pub free_alphas: bool,
    /// RMSE the fit is expected to reach; a collapsed simplex above this is
    /// reported as stagnation. Infinite by default (never fails).
    pub target_rmse: f64,
    /// Stop searching once the RMSE falls this low.
    pub stop_rmse: f64,
}

impl Default for FitOpts {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 3,
            max_evals: 4000,
            free_alphas: false,
            target_rmse: f64::INFINITY,
            stop_rmse: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub model: ClosedFormModel,
    pub rmse: f64,
    /// Objective evaluations spent across all restarts.
    pub evals: usize,
    /// Simplex runs beyond the first.
    pub restarts: usize,
    pub search_dim: usize,
    /// Carried over from frequency estimation.
    pub low_confidence: bool,
}

/// Splits a search vector into (alphas, betas, C, t0), folding negative raw
/// frequencies back to positive ones. cos(-βτ)∓sin(-βτ) = cos βτ ± sin βτ,
/// so flipping β's sign just swaps the amplitude pair.
fn decode(x: &[f64], k: usize, free_alphas: bool) -> (Vec<f64>, Vec<f64>, Vec<f64>, f64) {
    let (alphas, rest) = if free_alphas {
        (x[..k].to_vec(), &x[k..])
    } else {
        (vec![0.0; k], x)
    };
    let mut betas = Vec::with_capacity(k);
    let mut c = Vec::with_capacity(2 * k);
    for i in 0..k {
        let b = rest[i];
        if b < 0.0 {
            betas.push(-b);
            c.push(rest[k + 2 * i + 1]);
            c.push(rest[k + 2 * i]);
        } else {
            betas.push(b);
            c.push(rest[k + 2 * i]);
            c.push(rest[k + 2 * i + 1]);
        }
    }
    (alphas, betas, c, rest[3 * k])
}

/// Fits a K-mode model to one uniformly sampled window. Frequencies are
/// seeded from the periodogram, amplitudes from least squares, then the
/// simplex refines (betas, C, t0) jointly; alphas stay 0 unless freed. The
/// time shift is softly confined to one fundamental period, outside of which
/// it is unidentifiable.
pub fn fit_closed_form(sample: &TimeSeries, k: usize, opts: &FitOpts) -> Result<FitReport> {
    let n = sample.len();
    if n < 4 * k + 2 {
        return Err(Error::TooShort { required: 4 * k + 2, actual: n });
    }
    let est = estimate_frequencies(&sample.values, sample.dt, k)?;
    let times: Vec<f64> = sample.times().collect();
    let y = &sample.values;

    let alphas0 = vec![0.0; k];
    let c0 = ls_amplitudes(&alphas0, &est.betas, 0.0, &times, y)?;

    let mut x0 = Vec::with_capacity(ClosedFormModel::search_dim(k, opts.free_alphas));
    if opts.free_alphas {
        x0.extend_from_slice(&alphas0);
    }
    x0.extend_from_slice(&est.betas);
    x0.extend_from_slice(&c0);
    x0.push(0.0);

    let objective = |x: &[f64]| -> f64 {
        let (alphas, betas, c, t0) = decode(x, k, opts.free_alphas);
        let mut sq = 0.0;
        for (&t, &target) in times.iter().zip(y) {
            match eval_point(&alphas, &betas, &c, t0, t) {
                Ok(v) => sq += (v - target) * (v - target),
                Err(_) => return f64::INFINITY,
            }
        }
        let mut cost = (sq / times.len() as f64).sqrt();
        let min_beta = betas.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_beta > 1e-9 {
            let period = 2.0 * std::f64::consts::PI / min_beta;
            if t0 < 0.0 {
                cost += t0 * t0;
            } else if t0 > period {
                cost += (t0 - period) * (t0 - period);
            }
        }
        cost
    };

    let nm = NmOptions { max_evals: opts.max_evals, ..NmOptions::default() };
    let out =
        neldermead::minimize_with_restarts(objective, &x0, &nm, opts.restarts, opts.seed, opts.stop_rmse);

    let (alphas, betas, c, t0) = decode(&out.x, k, opts.free_alphas);
    let model = ClosedFormModel::new(alphas, betas, c, t0)?;
    let fitted = model.evaluate(&times)?;
    let rmse = (fitted
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / times.len() as f64)
        .sqrt();

    if rmse > opts.target_rmse {
        return Err(Error::Stagnation { restarts: out.restarts, rmse });
    }

    Ok(FitReport {
        model,
        rmse,
        evals: out.evals,
        restarts: out.restarts,
        search_dim: x0.len(),
        low_confidence: est.low_confidence,
    })
}

/// Writes a model as JSON with keys K, alphas, betas, C, t0.
pub fn save_model(path: impl AsRef<Path>, model: &ClosedFormModel) -> Result<()> {
    let text = serde_json::to_string_pretty(model)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ClosedFormModel> {
    let text = std::fs::read_to_string(path)?;
    let model: ClosedFormModel = serde_json::from_str(&text)?;
    ClosedFormModel::new(model.alphas, model.betas, model.c, model.t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linode::companion_from_char_poly;
    use crate::ode::{integrate, VectorField};
    use crate::series::synth;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_tone_sample() -> TimeSeries {
        synth("two_tone", 100, 0.0, 4.0 * std::f64::consts::PI)
            .unwrap()
            .into_scalar()
            .unwrap()
    }

    #[test]
    fn balanced_amplitudes_collapse_to_pure_cosine() {
        let m = ClosedFormModel::new(vec![0.0], vec![1.0], vec![0.5, 0.5], 0.0).unwrap();
        let grid: Vec<f64> = (0..50).map(|i| 0.13 * i as f64).collect();
        let vals = m.evaluate(&grid).unwrap();
        for (&t, v) in grid.iter().zip(vals) {
            assert!((v - t.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_amplitudes_give_the_zero_function() {
        let m = ClosedFormModel::new(vec![0.0], vec![2.0], vec![0.0, 0.0], 0.3).unwrap();
        let vals = m.evaluate(&[0.0, 1.0, 2.0]).unwrap();
        assert!(vals.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn least_squares_amplitudes_reproduce_two_tone() {
        let sample = two_tone_sample();
        let times: Vec<f64> = sample.times().collect();
        let c = ls_amplitudes(&[0.0, 0.0], &[1.0, 2.0], 0.0, &times, &sample.values).unwrap();
        let m = ClosedFormModel::new(vec![0.0, 0.0], vec![1.0, 2.0], c, 0.0).unwrap();
        let vals = m.evaluate(&times).unwrap();
        let max_err = vals
            .iter()
            .zip(&sample.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_err <= 1e-10, "max err {max_err}");
    }

    #[test]
    fn growing_exponent_is_reported_not_inf() {
        let m = ClosedFormModel::new(vec![1.0], vec![1.0], vec![1.0, 0.0], 0.0).unwrap();
        match m.evaluate(&[800.0]) {
            Err(Error::Overflow { exponent }) => assert!(exponent > 700.0),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn shifting_t0_shifts_the_time_axis_exactly() {
        let shifted = ClosedFormModel::new(vec![0.1], vec![1.7], vec![0.8, -0.3], 0.9).unwrap();
        let base = ClosedFormModel::new(vec![0.1], vec![1.7], vec![0.8, -0.3], 0.0).unwrap();
        for i in 0..40 {
            let t = -2.0 + 0.37 * i as f64;
            let a = shifted.evaluate(&[t]).unwrap()[0];
            let b = base.evaluate(&[t - 0.9]).unwrap()[0];
            assert_eq!(a, b);
        }
    }

    #[test]
    fn evaluation_is_linear_in_amplitudes() {
        let c1 = vec![0.4, -1.1, 0.2, 0.9];
        let c2 = vec![-0.7, 0.3, 1.5, -0.2];
        let sum: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
        let grid: Vec<f64> = (0..30).map(|i| 0.21 * i as f64).collect();
        let make = |c: Vec<f64>| {
            ClosedFormModel::new(vec![0.0, 0.0], vec![1.0, 2.5], c, 0.0).unwrap()
        };
        let v1 = make(c1).evaluate(&grid).unwrap();
        let v2 = make(c2).evaluate(&grid).unwrap();
        let vs = make(sum).evaluate(&grid).unwrap();
        for ((a, b), s) in v1.iter().zip(&v2).zip(&vs) {
            assert!((a + b - s).abs() < 1e-12);
        }
    }

    #[test]
    fn two_tone_frequencies_land_on_grid_bins() {
        let sample = two_tone_sample();
        let est = estimate_frequencies(&sample.values, sample.dt, 2).unwrap();
        assert!((est.betas[0] - 1.0).abs() < 1e-9, "got {:?}", est.betas);
        assert!((est.betas[1] - 2.0).abs() < 1e-9);
        assert!(!est.low_confidence);
    }

    #[test]
    fn single_tone_yields_its_one_frequency() {
        let n = 120;
        let dt = 2.0 * std::f64::consts::PI / n as f64;
        let values: Vec<f64> = (0..n).map(|i| (3.0 * dt * i as f64).sin()).collect();
        let est = estimate_frequencies(&values, dt, 1).unwrap();
        assert!((est.betas[0] - 3.0).abs() < 1e-9);
        assert!(!est.low_confidence);

        match estimate_frequencies(&values, dt, 2) {
            Err(Error::TooFewPeaks { found: 1, needed: 2 }) => {}
            other => panic!("expected too few peaks, got {other:?}"),
        }
    }

    #[test]
    fn noise_peaks_are_flagged_low_confidence() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut flagged = 0;
        for _ in 0..20 {
            let values: Vec<f64> = (0..128).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let est = estimate_frequencies(&values, 0.1, 1).unwrap();
            if est.low_confidence {
                flagged += 1;
            }
        }
        assert!(flagged >= 15, "only {flagged}/20 noise draws flagged");
    }

    #[test]
    fn constant_series_has_no_peaks() {
        let values = vec![3.5; 64];
        match estimate_frequencies(&values, 0.5, 1) {
            Err(Error::TooFewPeaks { found: 0, needed: 1 }) => {}
            other => panic!("expected no peaks, got {other:?}"),
        }
    }

    #[test]
    fn fit_recovers_two_tone_cheaply() {
        let sample = two_tone_sample();
        let report = fit_closed_form(&sample, 2, &FitOpts::default()).unwrap();
        assert!((report.model.betas[0] - 1.0).abs() < 0.02, "betas {:?}", report.model.betas);
        assert!((report.model.betas[1] - 2.0).abs() < 0.02);
        assert!(report.rmse <= 0.05, "rmse {}", report.rmse);
        assert_eq!(report.search_dim, 7);
        assert!(report.evals < 1000, "evals {}", report.evals);
    }

    #[test]
    fn fit_round_trips_its_own_output() {
        let truth =
            ClosedFormModel::new(vec![0.0, 0.0], vec![1.25, 2.6], vec![1.3, -0.4, 0.8, 0.6], 0.3)
                .unwrap();
        let n = 160;
        let dt = 10.0 / n as f64;
        let times: Vec<f64> = (0..n).map(|i| dt * i as f64).collect();
        let sample = TimeSeries::new(0.0, dt, truth.evaluate(&times).unwrap()).unwrap();
        let report = fit_closed_form(&sample, 2, &FitOpts::default()).unwrap();
        assert!(report.rmse <= 1e-6, "rmse {}", report.rmse);
    }

    #[test]
    fn single_mode_fit_inverts_the_cosine_example() {
        let n = 80;
        let dt = 4.0 * std::f64::consts::PI / n as f64;
        let values: Vec<f64> = (0..n).map(|i| (dt * i as f64).cos()).collect();
        let sample = TimeSeries::new(0.0, dt, values).unwrap();
        let report = fit_closed_form(&sample, 1, &FitOpts::default()).unwrap();
        assert!((report.model.betas[0] - 1.0).abs() < 0.02);
        assert!(report.rmse < 1e-6);
        // the two basis amplitudes both land at 0.5 up to phase freedom
        let m = &report.model;
        let back = m.evaluate(&[0.0]).unwrap()[0];
        assert!((back - 1.0).abs() < 1e-4);
    }

    #[test]
    fn underparameterized_fit_reports_stagnation() {
        let sample = two_tone_sample();
        let opts = FitOpts { target_rmse: 1e-6, ..FitOpts::default() };
        match fit_closed_form(&sample, 1, &opts) {
            Err(Error::Stagnation { rmse, .. }) => assert!(rmse > 1e-6),
            other => panic!("expected stagnation, got {other:?}"),
        }
    }

    #[test]
    fn matches_integrated_companion_dynamics() {
        // A K-mode model with alphas 0 solves x' = Ax for the companion matrix
        // of Π(λ² + βₖ²); check against the solver on one fundamental period.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let k = rng.gen_range(1..=3usize);
            let mut betas: Vec<f64> = Vec::new();
            while betas.len() < k {
                let b = rng.gen_range(0.5..3.0);
                if betas.iter().all(|&x: &f64| (x - b).abs() > 0.3) {
                    betas.push(b);
                }
            }
            betas.sort_by(f64::total_cmp);
            let c: Vec<f64> = (0..2 * k).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let t0 = rng.gen_range(0.0..2.0);
            let model = ClosedFormModel::new(vec![0.0; k], betas.clone(), c, t0).unwrap();

            // char poly Π(λ² + β²), ascending coefficients, monic dropped
            let mut poly = vec![1.0];
            for &b in &betas {
                let mut next = vec![0.0; poly.len() + 2];
                for (i, &p) in poly.iter().enumerate() {
                    next[i] += p * b * b;
                    next[i + 2] += p;
                }
                poly = next;
            }
            let a = companion_from_char_poly(&poly[..2 * k]).unwrap();

            // companion state is (x, x', ..., x^(2k-1)); derivative j of
            // P cos βτ + Q sin βτ is βʲ(P cos(βτ+jπ/2) + Q sin(βτ+jπ/2))
            let mut x0 = vec![0.0; 2 * k];
            for (j, slot) in x0.iter_mut().enumerate() {
                let mut v = 0.0;
                for (i, &b) in betas.iter().enumerate() {
                    let p = model.c[2 * i] + model.c[2 * i + 1];
                    let q = model.c[2 * i + 1] - model.c[2 * i];
                    let phase = -b * t0 + j as f64 * std::f64::consts::FRAC_PI_2;
                    v += b.powi(j as i32) * (p * phase.cos() + q * phase.sin());
                }
                *slot = v;
            }

            let period = 2.0 * std::f64::consts::PI / betas[0];
            let n = 200;
            let dt = period / (n - 1) as f64;
            let field = VectorField::linear(a).unwrap();
            let traj = integrate(&field, &x0, 0.0, dt, n, 8).unwrap();
            let times: Vec<f64> = (0..n).map(|i| dt * i as f64).collect();
            let direct = model.evaluate(&times).unwrap();
            for (i, (d, s)) in direct.iter().zip(&traj.states).enumerate() {
                assert!((d - s[0]).abs() < 1e-5, "k={k} i={i}: {d} vs {}", s[0]);
            }
        }
    }

    #[test]
    fn model_json_round_trips_with_stable_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let m =
            ClosedFormModel::new(vec![0.0, -0.1], vec![1.0, 2.0], vec![1.0, 2.0, 3.0, 4.0], 0.25)
                .unwrap();
        save_model(&path, &m).unwrap();

        let text = std::fs::read_to_string(&path).unwrap();
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(json["K"], 2);
        assert!(json.get("C").is_some());
        assert!(json.get("t0").is_some());

        let back = load_model(&path).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn constructor_sorts_modes_by_frequency() {
        let m = ClosedFormModel::new(
            vec![0.1, 0.2],
            vec![2.0, 1.0],
            vec![10.0, 11.0, 20.0, 21.0],
            0.0,
        )
        .unwrap();
        assert_eq!(m.betas, vec![1.0, 2.0]);
        assert_eq!(m.alphas, vec![0.2, 0.1]);
        assert_eq!(m.c, vec![20.0, 21.0, 10.0, 11.0]);
    }
}
