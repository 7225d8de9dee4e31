//! Seasonal autoregression with a one-step moving-average term:
//! x_t = c + phi * x_{t-P} + theta * e_{t-1} + e_t, fitted by conditional
//! least squares on the residual recursion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neldermead::{minimize_with_restarts, Options};
use crate::series::TimeSeries;

use super::{check_history, Forecaster};

/// Default season length, one day of hourly samples.
pub const SEASONAL_PERIOD: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeasonalArimaModel {
    pub c: f64,
    pub phi: f64,
    pub theta: f64,
    pub sigma_res: f64,
}

/// Sum of squared residuals with e zero-initialized before the first full
/// season.
fn css(x: &[f64], period: usize, c: f64, phi: f64, theta: f64) -> f64 {
    let mut prev_e = 0.0;
    let mut sum = 0.0;
    for t in period..x.len() {
        let e = x[t] - c - phi * x[t - period] - theta * prev_e;
        sum += e * e;
        prev_e = e;
    }
    sum
}

fn lag_autocorrelation(x: &[f64], lag: usize) -> f64 {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let var: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    if var <= 0.0 {
        return 0.0;
    }
    let cov: f64 = (lag..n).map(|t| (x[t] - mean) * (x[t - lag] - mean)).sum();
    cov / var
}

pub fn fit_sarima(train: &TimeSeries, period: usize) -> Result<SeasonalArimaModel> {
    if period == 0 {
        return Err(Error::InvalidParameter {
            name: "period".into(),
            reason: "must be positive".into(),
        });
    }
    let x = &train.values;
    if x.len() <= 2 * period {
        return Err(Error::TooShort { required: 2 * period + 1, actual: x.len() });
    }

    let phi0 = lag_autocorrelation(x, period).clamp(-0.98, 0.98);
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let x0 = vec![mean * (1.0 - phi0), phi0, 0.0];

    let objective = |p: &[f64]| {
        let v = css(x, period, p[0], p[1], p[2]);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let opts = Options { max_evals: 4000, ..Options::default() };
    let out = minimize_with_restarts(objective, &x0, &opts, 3, 0, f64::NEG_INFINITY);

    let best = css(x, period, out.x[0], out.x[1], out.x[2]);
    if !best.is_finite() {
        return Err(Error::Stagnation { restarts: 3, rmse: f64::INFINITY });
    }
    let dof = (x.len() - period) as f64;
    Ok(SeasonalArimaModel {
        c: out.x[0],
        phi: out.x[1],
        theta: out.x[2],
        sigma_res: (best / dof).sqrt(),
    })
}

/// Rolls the recursion forward with future shocks set to zero; only the
/// first step keeps a moving-average contribution.
pub fn sarima_forecast(
    model: &SeasonalArimaModel,
    history: &[f64],
    period: usize,
    n: usize,
) -> Result<Vec<f64>> {
    if history.len() < period {
        return Err(Error::TooShort { required: period, actual: history.len() });
    }
    let mut prev_e = 0.0;
    for t in period..history.len() {
        prev_e = history[t] - model.c - model.phi * history[t - period] - model.theta * prev_e;
    }
    let mut xs = history.to_vec();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let t = xs.len();
        let next = model.c + model.phi * xs[t - period] + model.theta * prev_e;
        xs.push(next);
        out.push(next);
        prev_e = 0.0;
    }
    Ok(out)
}

/// Window adapter around a fitted seasonal model.
#[derive(Debug, Clone)]
pub struct SarimaForecaster {
    model: SeasonalArimaModel,
    period: usize,
    m: usize,
    n: usize,
}

impl SarimaForecaster {
    pub fn fit(train: &TimeSeries, period: usize, m: usize, n: usize) -> Result<Self> {
        if m < period {
            return Err(Error::TooShort { required: period, actual: m });
        }
        let model = fit_sarima(train, period)?;
        Ok(Self { model, period, m, n })
    }

    pub fn model(&self) -> &SeasonalArimaModel {
        &self.model
    }
}

impl Forecaster for SarimaForecaster {
    fn history_len(&self) -> usize {
        self.m
    }

    fn horizon(&self) -> usize {
        self.n
    }

    fn predict(&self, history: &[f64]) -> Result<Vec<f64>> {
        check_history(history.len(), self.m)?;
        sarima_forecast(&self.model, history, self.period, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    use crate::series::{mae, synth};

    #[test]
    fn pure_seasonal_signal_pins_the_lag_coefficient() {
        let series = synth("seasonal24", 240, 0.0, 240.0).unwrap().into_scalar().unwrap();
        let model = fit_sarima(&series, SEASONAL_PERIOD).unwrap();
        assert!((model.phi - 1.0).abs() < 0.05, "phi {}", model.phi);
        assert!(model.c.abs() < 0.05, "c {}", model.c);
        assert!(model.sigma_res <= 1e-6, "sigma_res {}", model.sigma_res);
    }

    #[test]
    fn white_noise_has_no_seasonal_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let values: Vec<f64> = (0..400).map(|_| normal.sample(&mut rng)).collect();
        let series = TimeSeries { t0: 0.0, dt: 1.0, values };
        let model = fit_sarima(&series, SEASONAL_PERIOD).unwrap();
        assert!(model.phi.abs() < 0.1, "phi {}", model.phi);
        assert!((model.sigma_res - 1.0).abs() < 0.1, "sigma_res {}", model.sigma_res);
    }

    #[test]
    fn unit_lag_coefficient_repeats_the_last_season() {
        let model = SeasonalArimaModel { c: 0.0, phi: 1.0, theta: 0.0, sigma_res: 0.0 };
        let history: Vec<f64> = (0..48).map(|t| (t % 24) as f64).collect();
        let forecast = sarima_forecast(&model, &history, 24, 60).unwrap();
        for (j, v) in forecast.iter().enumerate() {
            assert_eq!(*v, ((48 + j) % 24) as f64);
        }
    }

    #[test]
    fn zero_lag_coefficient_forecasts_the_constant_mean() {
        let model = SeasonalArimaModel { c: 3.25, phi: 0.0, theta: 0.0, sigma_res: 0.0 };
        let history = vec![0.0; 30];
        let forecast = sarima_forecast(&model, &history, 24, 10).unwrap();
        assert!(forecast.iter().all(|v| *v == 3.25));
    }

    #[test]
    fn light_noise_keeps_long_horizons_accurate() {
        let clean = synth("seasonal24", 500, 0.0, 500.0).unwrap().into_scalar().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let normal = Normal::new(0.0, 0.1).unwrap();
        let mut noisy = clean.clone();
        for v in &mut noisy.values {
            *v += normal.sample(&mut rng);
        }

        let train = noisy.slice(0, 400).unwrap();
        let model = fit_sarima(&train, SEASONAL_PERIOD).unwrap();
        let history = &noisy.values[300..400];
        let forecast = sarima_forecast(&model, history, SEASONAL_PERIOD, 100).unwrap();
        let truth = &clean.values[400..500];
        let err = mae(&forecast, truth).unwrap();
        assert!(err <= 0.15, "horizon-100 mae {err}");
    }

    #[test]
    fn short_training_series_is_rejected() {
        let series = synth("seasonal24", 48, 0.0, 48.0).unwrap().into_scalar().unwrap();
        assert!(matches!(
            fit_sarima(&series, SEASONAL_PERIOD),
            Err(Error::TooShort { .. })
        ));
    }
}
