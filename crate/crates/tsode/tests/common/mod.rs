//! Oracles shared by the acceptance tests: spectra built from known roots,
//! assignment-based spectrum matching, and gradient comparison.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tsode::linode::Complex;
use tsode::mat::Mat;

/// Ascending coefficients of the monic polynomial with the given real roots
/// and conjugate pairs a ± bi, leading 1 dropped.
pub fn poly_from_roots(reals: &[f64], pairs: &[(f64, f64)]) -> Vec<f64> {
    let mut poly = vec![1.0];
    for &r in reals {
        // multiply by (λ - r)
        let mut next = vec![0.0; poly.len() + 1];
        for (i, &p) in poly.iter().enumerate() {
            next[i] -= r * p;
            next[i + 1] += p;
        }
        poly = next;
    }
    for &(a, b) in pairs {
        // (λ - a - bi)(λ - a + bi) = λ² - 2aλ + a² + b²
        let m = a * a + b * b;
        let mut next = vec![0.0; poly.len() + 2];
        for (i, &p) in poly.iter().enumerate() {
            next[i] += m * p;
            next[i + 1] -= 2.0 * a * p;
            next[i + 2] += p;
        }
        poly = next;
    }
    poly.pop();
    poly
}

/// The eigenvalue multiset those roots describe, conjugates spelled out.
pub fn roots_to_spectrum(reals: &[f64], pairs: &[(f64, f64)]) -> Vec<Complex> {
    let mut out: Vec<Complex> = reals.iter().map(|&r| Complex::new(r, 0.0)).collect();
    for &(a, b) in pairs {
        out.push(Complex::new(a, b));
        out.push(Complex::new(a, -b));
    }
    out
}

fn dist(x: Complex, y: Complex) -> f64 {
    (x.re - y.re).hypot(x.im - y.im)
}

/// Worst pairing distance under the best assignment of `got` onto `want`.
/// Exhaustive with pruning; sizes here never exceed 8.
pub fn spectrum_distance(got: &[Complex], want: &[Complex]) -> f64 {
    assert_eq!(got.len(), want.len(), "spectra differ in size");
    fn search(
        got: &[Complex],
        want: &[Complex],
        used: &mut [bool],
        i: usize,
        worst: f64,
        best: &mut f64,
    ) {
        if worst >= *best {
            return;
        }
        if i == got.len() {
            *best = worst;
            return;
        }
        for j in 0..want.len() {
            if !used[j] {
                used[j] = true;
                search(got, want, used, i + 1, worst.max(dist(got[i], want[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut used = vec![false; want.len()];
    search(got, want, &mut used, 0, 0.0, &mut best);
    best
}

/// Largest distance from any strictly complex eigenvalue to the nearest
/// conjugate among the others. Zero for a conjugate-closed multiset.
pub fn conjugate_closure_gap(spec: &[Complex]) -> f64 {
    let mut worst = 0.0f64;
    for (i, &l) in spec.iter().enumerate() {
        if l.im == 0.0 {
            continue;
        }
        let nearest = spec
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &m)| dist(m, l.conj()))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    worst
}

fn inverse(p: &Mat) -> Mat {
    let d = p.rows();
    let mut data = vec![0.0; d * d];
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        let col = p.solve(&e).expect("transform is invertible by construction");
        for (i, v) in col.into_iter().enumerate() {
            data[i * d + j] = v;
        }
    }
    Mat::from_vec(d, d, data).expect("square by construction")
}

/// Conjugates `a` by a random transform I + R/10, which keeps it far from
/// singular and preserves the spectrum in exact arithmetic.
pub fn random_similarity(a: &Mat, rng: &mut ChaCha8Rng) -> Mat {
    let d = a.rows();
    let mut p = Mat::identity(d);
    for i in 0..d {
        for j in 0..d {
            p[(i, j)] += 0.1 * rng.gen_range(-1.0..1.0);
        }
    }
    p.matmul(a).matmul(&inverse(&p))
}

/// Largest relative disagreement between two gradient vectors, with a small
/// floor so near-zero entries compare absolutely.
pub fn max_rel_gap(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len(), "gradient sizes differ");
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-4))
        .fold(0.0, f64::max)
}
