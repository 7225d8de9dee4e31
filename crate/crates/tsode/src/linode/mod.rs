//! Linear ODE systems x' = Ax fitted to data by gradient descent through the
//! solver, plus spectral analysis of the learned dynamics: eigenvalues, the
//! closed-form shape of solutions, and particular solutions for given
//! coefficients.

mod eigen;

pub use eigen::{Complex, MAX_DIM};

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::nn::Optimizer;
use crate::ode::{grad_through_solver, integrate, Trajectory, VectorField};
use crate::series::TimeSeries;

/// Dynamics matrix plus initial state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearOdeSystem {
    pub a: Mat,
    pub x0: Vec<f64>,
}

impl LinearOdeSystem {
    pub fn new(a: Mat, x0: Vec<f64>) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::DimensionMismatch { expected: a.rows(), got: a.cols() });
        }
        if x0.len() != a.rows() {
            return Err(Error::DimensionMismatch { expected: a.rows(), got: x0.len() });
        }
        if !a.is_finite() || x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "system".into(),
                reason: "entries must be finite".into(),
            });
        }
        Ok(Self { a, x0 })
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// Integrates the system over a uniform grid of `count` points.
    pub fn trajectory(&self, t0: f64, dt: f64, count: usize, substeps: usize) -> Result<Trajectory> {
        let field = VectorField::linear(self.a.clone())?;
        integrate(&field, &self.x0, t0, dt, count, substeps)
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        eigenvalues(&self.a)
    }
}

/// Eigenvalues in a fixed reporting order: by descending |imag|, then
/// descending imag, then ascending real. Conjugate pairs sit adjacent with
/// the positive-imaginary member first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex>,
}

pub fn eigenvalues(a: &Mat) -> Result<Spectrum> {
    let mut ev = eigen::compute(a)?;
    ev.sort_by(|x, y| {
        y.im.abs()
            .total_cmp(&x.im.abs())
            .then(y.im.total_cmp(&x.im))
            .then(x.re.total_cmp(&y.re))
    });
    Ok(Spectrum { eigenvalues: ev })
}

/// Builds the companion matrix of a monic polynomial
/// λ^d + c[d-1]·λ^(d-1) + … + c[1]·λ + c[0],
/// in first-order form: ones on the superdiagonal, -c along the last row.
pub fn companion_from_char_poly(coeffs: &[f64]) -> Result<Mat> {
    let d = coeffs.len();
    if d == 0 {
        return Err(Error::TooShort { required: 1, actual: 0 });
    }
    if coeffs.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "coeffs".into(),
            reason: "coefficients must be finite".into(),
        });
    }
    let mut a = Mat::zeros(d, d);
    for i in 0..d.saturating_sub(1) {
        a[(i, i + 1)] = 1.0;
    }
    for (j, c) in coeffs.iter().enumerate() {
        a[(d - 1, j)] = if *c == 0.0 { 0.0 } else { -c };
    }
    Ok(a)
}

/// One oscillatory or real mode e^{αt}·(cos βt, sin βt); β = 0 means a pure
/// exponential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub alpha: f64,
    pub beta: f64,
}

/// The functional shape of solutions to x' = Ax, as symbolic terms with
/// undetermined coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionForm {
    pub modes: Vec<Mode>,
    pub coefficients: Vec<String>,
    pub rendering: String,
}

/// Spectrum and solution shape of a dynamics matrix, ready to serialize.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex>,
    pub modes: Vec<Mode>,
    pub rendering: String,
}

fn modes_from_spectrum(spec: &Spectrum) -> Vec<Mode> {
    let mut modes: Vec<Mode> = spec
        .eigenvalues
        .iter()
        .filter(|v| v.im >= 0.0)
        .map(|v| Mode { alpha: v.re, beta: v.im })
        .collect();
    modes.sort_by(|x, y| y.beta.total_cmp(&x.beta).then(y.alpha.total_cmp(&x.alpha)));
    modes
}

/// Rounds to two decimals and prints without trailing zeros, so 2.0021 → "2",
/// -0.004 → "0", 0.5 → "0.5".
fn fmt2(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

fn subscript(i: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    i.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).expect("decimal digit") as usize])
        .collect()
}

fn exp_factor(alpha: f64) -> String {
    match fmt2(alpha).as_str() {
        "0" => String::new(),
        "1" => "e^{t}".to_string(),
        "-1" => "e^{-t}".to_string(),
        a => format!("e^{{{a}t}}"),
    }
}

fn trig_factor(name: &str, beta: f64) -> String {
    match fmt2(beta).as_str() {
        "1" => format!("{name} t"),
        b => format!("{name} {b}t"),
    }
}

/// Describes what solutions of x' = Ax look like, e.g.
/// "f(c₁cos 2t, c₂sin 2t, c₃e^{-t})". Parameters are rounded to two decimals
/// for display; an exponential factor that rounds to e^{0t} is dropped.
pub fn solution_form_report(a: &Mat) -> Result<SolutionForm> {
    let spec = eigenvalues(a)?;
    let modes = modes_from_spectrum(&spec);

    let mut terms = Vec::new();
    let mut idx = 1usize;
    for m in &modes {
        let exp = exp_factor(m.alpha);
        if m.beta > 0.0 {
            terms.push(format!("c{}{}{}", subscript(idx), exp, trig_factor("cos", m.beta)));
            terms.push(format!("c{}{}{}", subscript(idx + 1), exp, trig_factor("sin", m.beta)));
            idx += 2;
        } else if exp.is_empty() {
            terms.push(format!("c{}", subscript(idx)));
            idx += 1;
        } else {
            terms.push(format!("c{}{}", subscript(idx), exp));
            idx += 1;
        }
    }
    let rendering = if terms.len() == 1 {
        terms.pop().expect("one term")
    } else {
        format!("f({})", terms.join(", "))
    };
    let coefficients = (1..idx).map(|i| format!("c{}", subscript(i))).collect();
    Ok(SolutionForm { modes, coefficients, rendering })
}

pub fn spectrum_report(a: &Mat) -> Result<SpectrumReport> {
    let spec = eigenvalues(a)?;
    let form = solution_form_report(a)?;
    Ok(SpectrumReport {
        eigenvalues: spec.eigenvalues,
        modes: form.modes,
        rendering: form.rendering,
    })
}

/// A scalar solution built from the modes of a matrix with the coefficients
/// filled in: Σ e^{αt}·(cᵢ·cos βt + cᵢ₊₁·sin βt), real modes contributing a
/// single cᵢ·e^{αt} term. Uses the unrounded mode parameters.
#[derive(Debug, Clone)]
pub struct ParticularSolution {
    modes: Vec<Mode>,
    constants: Vec<f64>,
}

impl ParticularSolution {
    pub fn eval(&self, t: f64) -> f64 {
        let mut sum = 0.0;
        let mut i = 0;
        for m in &self.modes {
            let amp = (m.alpha * t).exp();
            if m.beta > 0.0 {
                let phase = m.beta * t;
                sum += amp * (self.constants[i] * phase.cos() + self.constants[i + 1] * phase.sin());
                i += 2;
            } else {
                sum += amp * self.constants[i];
                i += 1;
            }
        }
        sum
    }

    pub fn eval_grid(&self, t0: f64, dt: f64, count: usize) -> Vec<f64> {
        (0..count).map(|k| self.eval(t0 + k as f64 * dt)).collect()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }
}

/// Binds coefficients to the solution form of `a`, in term order (each
/// oscillatory mode takes a cos coefficient then a sin coefficient).
pub fn particular_solution_x1(a: &Mat, constants: &[f64]) -> Result<ParticularSolution> {
    let spec = eigenvalues(a)?;
    let modes = modes_from_spectrum(&spec);
    let n_terms: usize = modes.iter().map(|m| if m.beta > 0.0 { 2 } else { 1 }).sum();
    if constants.len() != n_terms {
        return Err(Error::LengthMismatch { left: n_terms, right: constants.len() });
    }
    Ok(ParticularSolution { modes, constants: constants.to_vec() })
}

/// Which update rule drives the fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradientMethod {
    Descent,
    Adam,
}

#[derive(Debug, Clone)]
pub struct TrainOpts {
    pub lr: f64,
    pub max_iters: usize,
    pub l1_penalty: f64,
    pub seed: u64,
    pub substeps: usize,
    pub method: GradientMethod,
}

impl Default for TrainOpts {
    fn default() -> Self {
        Self {
            lr: 0.2,
            max_iters: 1000,
            l1_penalty: 0.0,
            seed: 0,
            substeps: 1,
            method: GradientMethod::Adam,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub system: LinearOdeSystem,
    pub loss_history: Vec<f64>,
}

fn validate_train_opts(opts: &TrainOpts) -> Result<()> {
    if !opts.lr.is_finite() || opts.lr <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "lr".into(),
            reason: format!("must be positive and finite, got {}", opts.lr),
        });
    }
    if opts.substeps == 0 {
        return Err(Error::InvalidParameter {
            name: "substeps".into(),
            reason: "must be at least 1".into(),
        });
    }
    if opts.l1_penalty < 0.0 {
        return Err(Error::InvalidParameter {
            name: "l1_penalty".into(),
            reason: format!("must be non-negative, got {}", opts.l1_penalty),
        });
    }
    Ok(())
}

fn init_field(d: usize, seed: u64) -> Result<VectorField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..d * d).map(|_| rng.gen_range(-0.1..0.1)).collect();
    VectorField::linear(Mat::from_vec(d, d, data)?)
}

fn make_optimizer(method: GradientMethod, lr: f64, n: usize) -> Optimizer {
    match method {
        GradientMethod::Descent => Optimizer::sgd(lr),
        GradientMethod::Adam => Optimizer::adam(lr, n),
    }
}

/// Fits the dynamics matrix of x' = Ax so the solution from `x0` tracks
/// `samples` in mean squared error. The initial state is taken as given, not
/// learned. Entries of A start i.i.d. uniform in [-0.1, 0.1] from `seed`.
/// Returns the fitted system and the per-iteration loss.
pub fn train_linear_node(
    samples: &Trajectory,
    x0: &[f64],
    opts: &TrainOpts,
) -> Result<TrainReport> {
    validate_train_opts(opts)?;
    let d = samples.dim();
    let n = samples.len();
    if x0.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x0.len() });
    }
    if n < 2 {
        return Err(Error::TooShort { required: 2, actual: n });
    }

    let mut field = init_field(d, opts.seed)?;
    let mut optimizer = make_optimizer(opts.method, opts.lr, d * d);
    let mut history = Vec::with_capacity(opts.max_iters);
    let denom = (n * d) as f64;

    for iter in 0..opts.max_iters {
        let last = history.last().copied().unwrap_or(f64::INFINITY);
        let pred = match integrate(&field, x0, samples.t0, samples.dt, n, opts.substeps) {
            Err(Error::BlowUp { .. }) => {
                return Err(Error::Diverged { iteration: iter, loss: last })
            }
            other => other?,
        };
        let params = field.params();
        let mut loss = 0.0;
        let mut state_grads = vec![vec![0.0; d]; n];
        for ((gs, ps), ss) in state_grads.iter_mut().zip(&pred.states).zip(&samples.states) {
            for ((g, p), s) in gs.iter_mut().zip(ps).zip(ss) {
                let e = p - s;
                loss += e * e;
                *g = 2.0 * e / denom;
            }
        }
        loss /= denom;
        loss += opts.l1_penalty * params.iter().map(|v| v.abs()).sum::<f64>();
        if !loss.is_finite() {
            return Err(Error::Diverged { iteration: iter, loss });
        }
        history.push(loss);

        let (mut grads, _) =
            grad_through_solver(&field, x0, samples.t0, samples.dt, opts.substeps, &state_grads)?;
        if opts.l1_penalty > 0.0 {
            for (g, a) in grads.iter_mut().zip(&params) {
                *g += opts.l1_penalty * a.signum();
            }
        }
        let mut next = params;
        optimizer.step(&mut next, &grads);
        field.set_params(&next)?;
    }

    let a = Mat::from_vec(d, d, field.params())?;
    Ok(TrainReport { system: LinearOdeSystem::new(a, x0.to_vec())?, loss_history: history })
}

/// Fits x' = Ax of dimension `d` so the scalar readout w·x(t) tracks
/// `signal`. Initial state and readout stay fixed; only A is learned. Useful
/// when the observed series is one channel of an unobserved latent state.
pub fn train_linear_readout(
    signal: &TimeSeries,
    x0: &[f64],
    readout: &[f64],
    opts: &TrainOpts,
) -> Result<TrainReport> {
    validate_train_opts(opts)?;
    let d = x0.len();
    let n = signal.len();
    if readout.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: readout.len() });
    }
    if n < 2 {
        return Err(Error::TooShort { required: 2, actual: n });
    }

    let mut field = init_field(d, opts.seed)?;
    let mut optimizer = make_optimizer(opts.method, opts.lr, d * d);
    let mut history = Vec::with_capacity(opts.max_iters);

    for iter in 0..opts.max_iters {
        let last = history.last().copied().unwrap_or(f64::INFINITY);
        let pred = match integrate(&field, x0, signal.t0, signal.dt, n, opts.substeps) {
            Err(Error::BlowUp { .. }) => {
                return Err(Error::Diverged { iteration: iter, loss: last })
            }
            other => other?,
        };
        let params = field.params();
        let mut loss = 0.0;
        let mut state_grads = vec![vec![0.0; d]; n];
        for ((gs, ps), &target) in state_grads.iter_mut().zip(&pred.states).zip(&signal.values) {
            let y: f64 = readout.iter().zip(ps).map(|(w, x)| w * x).sum();
            let e = y - target;
            loss += e * e;
            let scale = 2.0 * e / n as f64;
            for (g, w) in gs.iter_mut().zip(readout) {
                *g = scale * w;
            }
        }
        loss /= n as f64;
        loss += opts.l1_penalty * params.iter().map(|v| v.abs()).sum::<f64>();
        if !loss.is_finite() {
            return Err(Error::Diverged { iteration: iter, loss });
        }
        history.push(loss);

        let (mut grads, _) =
            grad_through_solver(&field, x0, signal.t0, signal.dt, opts.substeps, &state_grads)?;
        if opts.l1_penalty > 0.0 {
            for (g, a) in grads.iter_mut().zip(&params) {
                *g += opts.l1_penalty * a.signum();
            }
        }
        let mut next = params;
        optimizer.step(&mut next, &grads);
        field.set_params(&next)?;
    }

    let a = Mat::from_vec(d, d, field.params())?;
    Ok(TrainReport { system: LinearOdeSystem::new(a, x0.to_vec())?, loss_history: history })
}

/// Reads a square matrix from headerless CSV, one row per line.
pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<Mat> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(record.len());
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::UnparseableCell {
                row: i + 1,
                column: format!("{}", j + 1),
                value: cell.to_string(),
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::TooShort { required: 1, actual: 0 });
    }
    if rows.len() != rows[0].len() {
        return Err(Error::DimensionMismatch { expected: rows.len(), got: rows[0].len() });
    }
    Mat::from_rows(&rows)
}

/// Writes a matrix as headerless CSV with full round-trip precision.
pub fn save_matrix_csv(path: impl AsRef<Path>, a: &Mat) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_path(path.as_ref())?;
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|v| format!("{v:?}")).collect();
        writer.write_record(&row)?;
    }
    writer.flush().map_err(Error::Io)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::integrate;

    fn dense_two_tone_matrix() -> Mat {
        Mat::from_rows(&[
            vec![-0.36, -1.36, -0.04, 0.45],
            vec![2.36, 0.43, -0.47, -1.06],
            vec![0.95, -0.19, -0.03, 0.74],
            vec![-0.16, 1.09, -1.06, -0.04],
        ])
        .unwrap()
    }

    #[test]
    fn companion_matrix_layout_is_exact() {
        let a = companion_from_char_poly(&[4.0, 0.0, 5.0, 0.0]).unwrap();
        let want = Mat::from_rows(&[
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![-4.0, 0.0, -5.0, 0.0],
        ])
        .unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(a[(i, j)], want[(i, j)]);
            }
        }
        let one = companion_from_char_poly(&[-3.0]).unwrap();
        assert_eq!(one[(0, 0)], 3.0);
    }

    #[test]
    fn companion_spectrum_hits_both_tones() {
        let a = companion_from_char_poly(&[4.0, 0.0, 5.0, 0.0]).unwrap();
        let spec = eigenvalues(&a).unwrap();
        let got: Vec<(f64, f64)> = spec.eigenvalues.iter().map(|v| (v.re, v.im)).collect();
        let want = [(0.0, 2.0), (0.0, -2.0), (0.0, 1.0), (0.0, -1.0)];
        for ((gre, gim), (wre, wim)) in got.iter().zip(want) {
            assert!((gre - wre).abs() < 1e-8, "re {gre} vs {wre}");
            assert!((gim - wim).abs() < 1e-8, "im {gim} vs {wim}");
        }
    }

    #[test]
    fn dense_matrix_near_two_tones_renders_trig_only_terms() {
        let form = solution_form_report(&dense_two_tone_matrix()).unwrap();
        assert_eq!(form.rendering, "f(c₁cos 2t, c₂sin 2t, c₃cos t, c₄sin t)");
        assert_eq!(form.coefficients, vec!["c₁", "c₂", "c₃", "c₄"]);
        assert_eq!(form.modes.len(), 2);
        assert!((form.modes[0].beta - 2.0).abs() < 0.05);
        assert!((form.modes[1].beta - 1.0).abs() < 0.05);
        assert!(form.modes[0].alpha.abs() < 0.05);
        assert!(form.modes[1].alpha.abs() < 0.05);
    }

    #[test]
    fn single_decay_renders_bare_exponential() {
        let a = Mat::from_rows(&[vec![-1.0]]).unwrap();
        let form = solution_form_report(&a).unwrap();
        assert_eq!(form.rendering, "c₁e^{-t}");
        assert_eq!(form.modes, vec![Mode { alpha: -1.0, beta: 0.0 }]);

        let g = Mat::from_rows(&[vec![1.0]]).unwrap();
        assert_eq!(solution_form_report(&g).unwrap().rendering, "c₁e^{t}");
        let h = Mat::from_rows(&[vec![0.5]]).unwrap();
        assert_eq!(solution_form_report(&h).unwrap().rendering, "c₁e^{0.5t}");
    }

    #[test]
    fn zero_dynamics_render_constants() {
        let form = solution_form_report(&Mat::zeros(2, 2)).unwrap();
        assert_eq!(form.rendering, "f(c₁, c₂)");
    }

    #[test]
    fn mixed_decay_and_oscillation_orders_by_frequency() {
        // (λ+1)(λ²+4) = λ³ + λ² + 4λ + 4
        let a = companion_from_char_poly(&[4.0, 4.0, 1.0]).unwrap();
        let form = solution_form_report(&a).unwrap();
        assert_eq!(form.rendering, "f(c₁cos 2t, c₂sin 2t, c₃e^{-t})");
    }

    #[test]
    fn particular_solution_matches_integrated_companion_system() {
        let a = companion_from_char_poly(&[4.0, 0.0, 5.0, 0.0]).unwrap();
        let sol = particular_solution_x1(&a, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        // x₁(t) = sin 2t, so the companion state starts at (0, 2, 0, -8)
        let field = VectorField::linear(a).unwrap();
        let n = 201;
        let dt = 2.0 * std::f64::consts::PI / (n as f64 - 1.0);
        let traj = integrate(&field, &[0.0, 2.0, 0.0, -8.0], 0.0, dt, n, 8).unwrap();
        for i in 0..n {
            let t = i as f64 * dt;
            assert!((sol.eval(t) - (2.0 * t).sin()).abs() < 1e-9);
            assert!((sol.eval(t) - traj.states[i][0]).abs() < 1e-6, "t={t}");
        }
        let grid = sol.eval_grid(0.0, dt, n);
        assert_eq!(grid.len(), n);
        assert!((grid[0] - 0.0).abs() < 1e-12);
    }

    #[test]
    fn particular_solution_checks_coefficient_count() {
        let a = companion_from_char_poly(&[4.0, 0.0, 5.0, 0.0]).unwrap();
        assert!(matches!(
            particular_solution_x1(&a, &[1.0, 2.0]),
            Err(Error::LengthMismatch { left: 4, right: 2 })
        ));
    }

    #[test]
    fn training_recovers_rotation_dynamics() {
        let truth = Mat::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let field = VectorField::linear(truth.clone()).unwrap();
        let samples = integrate(&field, &[0.0, 1.0], 0.0, 0.1, 60, 4).unwrap();

        let report = train_linear_node(&samples, &[0.0, 1.0], &TrainOpts::default()).unwrap();
        assert_eq!(report.loss_history.len(), 1000);
        assert!(report.loss_history[999] < report.loss_history[0]);
        for i in 0..2 {
            for j in 0..2 {
                let err = (report.system.a[(i, j)] - truth[(i, j)]).abs();
                assert!(err < 0.02, "entry ({i},{j}) off by {err}");
            }
        }
    }

    #[test]
    fn zero_iterations_return_the_seeded_init() {
        let field = VectorField::linear(Mat::identity(2)).unwrap();
        let samples = integrate(&field, &[1.0, 1.0], 0.0, 0.1, 5, 1).unwrap();
        let opts = TrainOpts { max_iters: 0, ..TrainOpts::default() };
        let r1 = train_linear_node(&samples, &[1.0, 1.0], &opts).unwrap();
        let r2 = train_linear_node(&samples, &[1.0, 1.0], &opts).unwrap();
        assert!(r1.loss_history.is_empty());
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(r1.system.a[(i, j)], r2.system.a[(i, j)]);
                assert!(r1.system.a[(i, j)].abs() < 0.1);
            }
        }
        let other = TrainOpts { max_iters: 0, seed: 9, ..TrainOpts::default() };
        let r3 = train_linear_node(&samples, &[1.0, 1.0], &other).unwrap();
        let same = (0..2).all(|i| (0..2).all(|j| r3.system.a[(i, j)] == r1.system.a[(i, j)]));
        assert!(!same, "different seeds must give different inits");
    }

    #[test]
    fn l1_penalty_shrinks_parameter_mass() {
        let truth = Mat::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let field = VectorField::linear(truth).unwrap();
        let samples = integrate(&field, &[0.0, 1.0], 0.0, 0.1, 40, 2).unwrap();

        let plain = TrainOpts { max_iters: 300, ..TrainOpts::default() };
        let strong = TrainOpts { max_iters: 300, l1_penalty: 0.5, ..TrainOpts::default() };
        let free = train_linear_node(&samples, &[0.0, 1.0], &plain).unwrap();
        let sparse = train_linear_node(&samples, &[0.0, 1.0], &strong).unwrap();
        let mass = |m: &Mat| (0..2).flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].abs())
            .sum::<f64>();
        assert!(mass(&sparse.system.a) < mass(&free.system.a));
    }

    #[test]
    fn readout_gradient_matches_finite_differences() {
        let signal = TimeSeries::new(0.0, 0.2, (0..12).map(|i| (0.2 * i as f64).sin()).collect())
            .unwrap();
        let x0 = [0.3, -0.2];
        let readout = [1.0, 0.5];
        let theta0 = [0.05, -0.08, 0.02, 0.07];

        let loss_at = |theta: &[f64]| -> f64 {
            let a = Mat::from_vec(2, 2, theta.to_vec()).unwrap();
            let field = VectorField::linear(a).unwrap();
            let traj = integrate(&field, &x0, signal.t0, signal.dt, signal.len(), 2).unwrap();
            let mut loss = 0.0;
            for i in 0..signal.len() {
                let y: f64 = readout.iter().zip(&traj.states[i]).map(|(w, x)| w * x).sum();
                loss += (y - signal.values[i]).powi(2);
            }
            loss / signal.len() as f64
        };

        // analytic gradient via the solver, as the trainer computes it
        let field = VectorField::linear(Mat::from_vec(2, 2, theta0.to_vec()).unwrap()).unwrap();
        let traj = integrate(&field, &x0, signal.t0, signal.dt, signal.len(), 2).unwrap();
        let mut state_grads = vec![vec![0.0; 2]; signal.len()];
        for ((gs, ts), &target) in state_grads.iter_mut().zip(&traj.states).zip(&signal.values) {
            let y: f64 = readout.iter().zip(ts).map(|(w, x)| w * x).sum();
            let scale = 2.0 * (y - target) / signal.len() as f64;
            for (g, w) in gs.iter_mut().zip(&readout) {
                *g = scale * w;
            }
        }
        let (grads, _) =
            grad_through_solver(&field, &x0, signal.t0, signal.dt, 2, &state_grads).unwrap();

        for k in 0..4 {
            let h = 1e-6;
            let mut up = theta0;
            let mut dn = theta0;
            up[k] += h;
            dn[k] -= h;
            let fd = (loss_at(&up) - loss_at(&dn)) / (2.0 * h);
            let rel = (grads[k] - fd).abs() / fd.abs().max(grads[k].abs()).max(1e-9);
            assert!(rel < 1e-5, "param {k}: analytic {} vs fd {fd}", grads[k]);
        }
    }

    #[test]
    fn matrix_csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        let a = dense_two_tone_matrix();
        save_matrix_csv(&path, &a).unwrap();
        let b = load_matrix_csv(&path).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(a[(i, j)], b[(i, j)]);
            }
        }
    }

    #[test]
    fn matrix_csv_rejects_bad_cells_and_shapes() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "1.0,2.0\n3.0,oops\n").unwrap();
        assert!(matches!(load_matrix_csv(&bad), Err(Error::UnparseableCell { row: 2, .. })));

        let rect = dir.path().join("rect.csv");
        std::fs::write(&rect, "1.0,2.0,3.0\n4.0,5.0,6.0\n").unwrap();
        assert!(load_matrix_csv(&rect).is_err());
    }

    #[test]
    fn spectrum_report_serializes_with_stable_keys() {
        let report = spectrum_report(&dense_two_tone_matrix()).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert!(json["eigenvalues"][0]["im"].as_f64().unwrap() > 1.9);
        assert!(json["modes"][0]["beta"].as_f64().unwrap() > 1.9);
        assert_eq!(
            json["rendering"].as_str().unwrap(),
            "f(c₁cos 2t, c₂sin 2t, c₃cos t, c₄sin t)"
        );
    }
}
