//! Nelder-Mead simplex minimization with seeded restarts.
//!
//! Used wherever a derivative-free fit is needed (closed-form solution
//! parameters, seasonal ARIMA coefficients). Non-finite objective values are
//! treated as +inf so the simplex backs away from invalid regions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone, Copy)]
pub struct Options {
    /// Hard budget on objective evaluations per run.
    pub max_evals: usize,
    /// Absolute displacement used to build the initial simplex and to jitter
    /// restart points.
    pub initial_step: f64,
    /// A run stops once the simplex diameter falls below this.
    pub diameter_tol: f64,
    /// A run stops once the objective spread across the simplex falls below this.
    pub spread_tol: f64,
    /// A run stops as soon as the best objective value reaches this, without
    /// waiting for the simplex to collapse. Defaults to -inf (disabled).
    pub stop_fx: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            initial_step: 0.1,
            diameter_tol: 1e-12,
            spread_tol: 1e-14,
            stop_fx: f64::NEG_INFINITY,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub fx: f64,
    /// Total objective evaluations spent.
    pub evals: usize,
    /// Final simplex diameter (max vertex distance from the best vertex).
    pub diameter: f64,
    /// Restarts actually performed (0 for a single run).
    pub restarts: usize,
}

const ALPHA: f64 = 1.0; // reflection
const GAMMA: f64 = 2.0; // expansion
const RHO: f64 = 0.5; // contraction
const SIGMA: f64 = 0.5; // shrink

fn guard(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// Minimizes `f` starting from `x0` with a single simplex run.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &Options) -> Outcome {
    let n = x0.len();
    assert!(n >= 1, "need at least one coordinate");
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        guard(f(x))
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p, &mut evals)).collect();

    let diameter = |simplex: &[Vec<f64>], best: usize| -> f64 {
        simplex
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    };

    let mut order: Vec<usize> = (0..=n).collect();
    loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let diam = diameter(&simplex, best);
        let spread = values[worst] - values[best];
        if values[best] <= opts.stop_fx
            || evals >= opts.max_evals
            || diam < opts.diameter_tol
            || spread < opts.spread_tol
        {
            return Outcome {
                x: simplex[best].clone(),
                fx: values[best],
                evals,
                diameter: diam,
                restarts: 0,
            };
        }

        let mut centroid = vec![0.0; n];
        for &i in order.iter().take(n) {
            for (c, v) in centroid.iter_mut().zip(&simplex[i]) {
                *c += v / n as f64;
            }
        }

        let blend = |a: &[f64], b: &[f64], w: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + w * (x - y)).collect()
        };

        let reflected = blend(&centroid, &simplex[worst], ALPHA);
        let f_reflected = eval(&reflected, &mut evals);

        if f_reflected < values[best] {
            let expanded = blend(&centroid, &simplex[worst], GAMMA);
            let f_expanded = eval(&expanded, &mut evals);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if f_reflected < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            let (contracted, f_against) = if f_reflected < values[worst] {
                // outside contraction, toward the reflected point
                let p: Vec<f64> = centroid
                    .iter()
                    .zip(&reflected)
                    .map(|(c, r)| c + RHO * (r - c))
                    .collect();
                (p, f_reflected)
            } else {
                // inside contraction, toward the worst vertex
                let p: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[worst])
                    .map(|(c, w)| c + RHO * (w - c))
                    .collect();
                (p, values[worst])
            };
            let f_contracted = eval(&contracted, &mut evals);
            if f_contracted < f_against {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                for &i in order.iter().skip(1) {
                    let shrunk: Vec<f64> = simplex[i]
                        .iter()
                        .zip(&simplex[best])
                        .map(|(p, b)| b + SIGMA * (p - b))
                        .collect();
                    simplex[i] = shrunk;
                    values[i] = eval(&simplex[i], &mut evals);
                }
            }
        }
    }
}

/// Runs [`minimize`] up to `restarts + 1` times, jittering the start point
/// with seeded Gaussian noise after the first run, and keeps the best result.
/// Later runs are skipped once a run ends with its simplex collapsed onto an
/// objective value at or below `good_enough`.
pub fn minimize_with_restarts<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &Options,
    restarts: usize,
    seed: u64,
    good_enough: f64,
) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, opts.initial_step).expect("step is finite");
    let mut best: Option<Outcome> = None;
    let mut total_evals = 0usize;
    let mut runs = 0usize;
    let run_opts = Options { stop_fx: opts.stop_fx.max(good_enough), ..*opts };

    for run in 0..=restarts {
        let start: Vec<f64> = if run == 0 {
            x0.to_vec()
        } else {
            x0.iter().map(|v| v + jitter.sample(&mut rng)).collect()
        };
        let outcome = minimize(&mut f, &start, &run_opts);
        total_evals += outcome.evals;
        runs = run;
        let better = best.as_ref().is_none_or(|b| outcome.fx < b.fx);
        if better {
            best = Some(outcome);
        }
        if best.as_ref().is_some_and(|b| b.fx <= good_enough) {
            break;
        }
    }

    let mut out = best.expect("at least one run");
    out.evals = total_evals;
    out.restarts = runs;
    out
}
