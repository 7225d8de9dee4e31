//! Time-series data model: ingestion, preprocessing, windowing, noise,
//! metrics, and the synthetic signals used throughout the tests and the
//! benchmark harness.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly sampled scalar signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "dt".into(),
                reason: format!("must be positive, got {dt}"),
            });
        }
        if values.is_empty() {
            return Err(Error::TooShort { required: 1, actual: 0 });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "values".into(),
                reason: "contains a non-finite entry".into(),
            });
        }
        Ok(Self { t0, dt, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.time(i))
    }

    /// Contiguous sub-series of `len` points starting at index `start`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.len() {
            return Err(Error::TooShort {
                required: start + len,
                actual: self.len(),
            });
        }
        Self::new(self.time(start), self.dt, self.values[start..start + len].to_vec())
    }
}

/// Uniformly sampled vector signal; `states[i]` is the state at `t0 + i·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSeries {
    pub t0: f64,
    pub dt: f64,
    pub states: Vec<Vec<f64>>,
}

impl VectorSeries {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, |s| s.len())
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// Scalar series of one state component.
    pub fn component(&self, j: usize) -> Result<TimeSeries> {
        if j >= self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: j,
            });
        }
        TimeSeries::new(self.t0, self.dt, self.states.iter().map(|s| s[j]).collect())
    }
}

/// Affine normalization parameters of a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: f64,
    pub std: f64,
}

impl Scaler {
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|v| (v - self.mean) / self.std).collect()
    }

    pub fn invert(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|v| v * self.std + self.mean).collect()
    }
}

/// One supervised example: `history` immediately precedes `target` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPair {
    pub history: Vec<f64>,
    pub target: Vec<f64>,
}

/// Chronological train/validation/test fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_frac: f64,
    pub val_frac: f64,
    pub test_frac: f64,
}

impl SplitSpec {
    pub fn new(train_frac: f64, val_frac: f64, test_frac: f64) -> Result<Self> {
        let spec = Self { train_frac, val_frac, test_frac };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        for (name, f) in [
            ("train_frac", self.train_frac),
            ("val_frac", self.val_frac),
            ("test_frac", self.test_frac),
        ] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: format!("must lie in (0,1), got {f}"),
                });
            }
        }
        let sum = self.train_frac + self.val_frac + self.test_frac;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "split".into(),
                reason: format!("fractions sum to {sum}, expected 1"),
            });
        }
        Ok(())
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { train_frac: 0.7, val_frac: 0.2, test_frac: 0.1 }
    }
}

/// Additive Gaussian noise parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

/// Reads a series from a CSV file. The first column is the time grid; the
/// named column supplies the values. The grid must be uniform: every step may
/// deviate from the first one by at most 1e-9·dt.
pub fn load_csv(path: &Path, column: &str) -> Result<TimeSeries> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::MissingColumn(column.to_string()))?;

    let mut times = Vec::new();
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |idx: usize| -> Result<f64> {
            let cell = record.get(idx).unwrap_or("");
            cell.trim().parse::<f64>().map_err(|_| Error::UnparseableCell {
                row: row + 1,
                column: headers.get(idx).unwrap_or("").to_string(),
                value: cell.to_string(),
            })
        };
        times.push(parse(0)?);
        values.push(parse(col)?);
    }
    if times.len() < 2 {
        return Err(Error::TooShort { required: 2, actual: times.len() });
    }

    let dt = times[1] - times[0];
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "time".into(),
            reason: format!("first step is {dt}, expected a positive step"),
        });
    }
    for (i, pair) in times.windows(2).enumerate() {
        let step = pair[1] - pair[0];
        if (step - dt).abs() > 1e-9 * dt {
            return Err(Error::NonUniformGrid { row: i + 2, dt, got: step });
        }
    }
    TimeSeries::new(times[0], dt, values)
}

/// Rescales to zero mean and unit population standard deviation.
pub fn standardize(ts: &TimeSeries) -> Result<(TimeSeries, Scaler)> {
    let n = ts.len();
    if n < 2 {
        return Err(Error::TooShort { required: 2, actual: n });
    }
    let mean = ts.values.iter().sum::<f64>() / n as f64;
    let var = ts.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let std = var.sqrt();
    if std == 0.0 {
        return Err(Error::ConstantSeries);
    }
    let scaler = Scaler { mean, std };
    let scaled = TimeSeries::new(ts.t0, ts.dt, scaler.apply(&ts.values))?;
    Ok((scaled, scaler))
}

/// Inverse of [`standardize`] on raw values.
pub fn unscale(values: &[f64], scaler: &Scaler) -> Vec<f64> {
    scaler.invert(values)
}

/// Adds i.i.d. Gaussian noise drawn deterministically from `spec.seed`.
/// With sigma = 0 the input is returned unchanged.
pub fn add_noise(ts: &TimeSeries, spec: &NoiseSpec) -> Result<TimeSeries> {
    if spec.sigma < 0.0 {
        return Err(Error::InvalidParameter {
            name: "sigma".into(),
            reason: format!("must be nonnegative, got {}", spec.sigma),
        });
    }
    if spec.sigma == 0.0 {
        return Ok(ts.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, spec.sigma).expect("sigma checked above");
    let values = ts.values.iter().map(|v| v + normal.sample(&mut rng)).collect();
    TimeSeries::new(ts.t0, ts.dt, values)
}

/// Enumerates contiguous (history, target) pairs with the given stride.
pub fn make_windows(ts: &TimeSeries, m: usize, n: usize, stride: usize) -> Result<Vec<WindowPair>> {
    if m < 1 || n < 1 {
        return Err(Error::InvalidParameter {
            name: "window".into(),
            reason: format!("m and n must be at least 1, got m={m}, n={n}"),
        });
    }
    if stride < 1 {
        return Err(Error::InvalidParameter {
            name: "stride".into(),
            reason: "must be at least 1".into(),
        });
    }
    let len = ts.len();
    if m + n > len {
        return Err(Error::TooShort { required: m + n, actual: len });
    }
    let count = (len - m - n) / stride + 1;
    let mut windows = Vec::with_capacity(count);
    for k in 0..count {
        let s = k * stride;
        windows.push(WindowPair {
            history: ts.values[s..s + m].to_vec(),
            target: ts.values[s + m..s + m + n].to_vec(),
        });
    }
    Ok(windows)
}

/// Splits into chronological train/validation/test segments. Train and
/// validation lengths are floored; the remainder goes to test.
pub fn split(ts: &TimeSeries, spec: &SplitSpec) -> Result<(TimeSeries, TimeSeries, TimeSeries)> {
    spec.validate()?;
    let n = ts.len();
    let n_train = (spec.train_frac * n as f64).floor() as usize;
    let n_val = (spec.val_frac * n as f64).floor() as usize;
    let n_test = n - n_train - n_val;
    if n_train == 0 || n_val == 0 || n_test == 0 {
        return Err(Error::InvalidParameter {
            name: "split".into(),
            reason: format!("lengths {n_train}/{n_val}/{n_test} contain an empty segment"),
        });
    }
    Ok((
        ts.slice(0, n_train)?,
        ts.slice(n_train, n_val)?,
        ts.slice(n_train + n_val, n_test)?,
    ))
}

/// Mean absolute error between two equal-length sequences.
pub fn mae(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { left: pred.len(), right: truth.len() });
    }
    if pred.is_empty() {
        return Err(Error::TooShort { required: 1, actual: 0 });
    }
    let sum: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t).abs()).sum();
    Ok(sum / pred.len() as f64)
}

/// Output of [`synth`]: most signals are scalar, `sine_pair` is 2-dimensional.
#[derive(Debug, Clone, PartialEq)]
pub enum SynthOutput {
    Scalar(TimeSeries),
    Vector(VectorSeries),
}

impl SynthOutput {
    pub fn into_scalar(self) -> Result<TimeSeries> {
        match self {
            SynthOutput::Scalar(ts) => Ok(ts),
            SynthOutput::Vector(vs) => Err(Error::DimensionMismatch {
                expected: 1,
                got: vs.dim(),
            }),
        }
    }

    pub fn into_vector(self) -> Result<VectorSeries> {
        match self {
            SynthOutput::Vector(vs) => Ok(vs),
            SynthOutput::Scalar(ts) => Ok(VectorSeries {
                t0: ts.t0,
                dt: ts.dt,
                states: ts.values.into_iter().map(|v| vec![v]).collect(),
            }),
        }
    }
}

/// Samples a named synthetic signal on the half-open grid
/// t_i = t_start + i·dt with dt = (t_end − t_start)/count.
///
/// `sine_pair` is the vector signal [sin t, cos t]; `two_tone` is
/// 4 sin t − 5 sin 2t; `seasonal24` is sin(2πt/24).
pub fn synth(name: &str, count: usize, t_start: f64, t_end: f64) -> Result<SynthOutput> {
    if count < 2 {
        return Err(Error::TooShort { required: 2, actual: count });
    }
    if t_end <= t_start {
        return Err(Error::InvalidParameter {
            name: "t_end".into(),
            reason: format!("must exceed t_start, got [{t_start}, {t_end}]"),
        });
    }
    let dt = (t_end - t_start) / count as f64;
    let grid = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
        (0..count).map(|i| f(t_start + i as f64 * dt)).collect()
    };
    match name {
        "sine_pair" => {
            let states = (0..count)
                .map(|i| {
                    let t = t_start + i as f64 * dt;
                    vec![t.sin(), t.cos()]
                })
                .collect();
            Ok(SynthOutput::Vector(VectorSeries { t0: t_start, dt, states }))
        }
        "two_tone" => Ok(SynthOutput::Scalar(TimeSeries::new(
            t_start,
            dt,
            grid(&|t| 4.0 * t.sin() - 5.0 * (2.0 * t).sin()),
        )?)),
        "seasonal24" => Ok(SynthOutput::Scalar(TimeSeries::new(
            t_start,
            dt,
            grid(&|t| (2.0 * std::f64::consts::PI * t / 24.0).sin()),
        )?)),
        other => Err(Error::InvalidParameter {
            name: "name".into(),
            reason: format!("unknown signal '{other}'"),
        }),
    }
}
