//! Forecast window plots rendered as self-contained SVG. Output bytes are a
//! pure function of the input series, so identical calls produce identical
//! files.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::{
    cell_seed, fit_model, fnv1a, noise_seed, prepare_dataset, predict_window, GridConfig,
};
use crate::series::{add_noise, NoiseSpec};

#[derive(Debug, Clone)]
pub struct PlotSeries {
    pub label: String,
    pub values: Vec<f64>,
}

/// One picked window: observed history, true continuation, and each model's
/// forecast over the same horizon.
#[derive(Debug, Clone)]
pub struct PlotBundle {
    pub name: String,
    pub history: Vec<f64>,
    pub truth: Vec<f64>,
    pub predictions: Vec<PlotSeries>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 62.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 16.0;
const MARGIN_B: f64 = 42.0;

const HISTORY_COLOR: &str = "#8a8a8a";
const TRUTH_COLOR: &str = "#000000";
const MODEL_COLORS: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(out: &mut String, points: &[(f64, f64)], color: &str, dashed: bool) {
    let mut attr = format!("fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"");
    if dashed {
        attr.push_str(" stroke-dasharray=\"5,3\"");
    }
    let coords: Vec<String> =
        points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(out, "<polyline {attr} points=\"{}\"/>", coords.join(" "));
}

fn render(history: &[f64], truth: &[f64], predictions: &[PlotSeries]) -> String {
    let m = history.len();
    let n = truth.len();
    let x_min = -(m as f64);
    let x_max = (n - 1) as f64;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for v in history.iter().chain(truth).chain(predictions.iter().flat_map(|p| &p.values)) {
        y_min = y_min.min(*v);
        y_max = y_max.max(*v);
    }
    let pad = if y_max > y_min { 0.05 * (y_max - y_min) } else { 1.0 };
    y_min -= pad;
    y_max += pad;

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
    let py = |y: f64| HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);

    // axes with 5 labeled ticks each
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333333"/>"##
    );
    for i in 0..=4 {
        let fx = x_min + (x_max - x_min) * i as f64 / 4.0;
        let fy = y_min + (y_max - y_min) * i as f64 / 4.0;
        let tx = px(fx);
        let ty = py(fy);
        let _ = writeln!(
            svg,
            r##"<line x1="{tx:.2}" y1="{:.2}" x2="{tx:.2}" y2="{:.2}" stroke="#333333"/>"##,
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{tx:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{fx:.0}</text>"#,
            HEIGHT - MARGIN_B + 18.0
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{ty:.2}" x2="{MARGIN_L}" y2="{ty:.2}" stroke="#333333"/>"##,
            MARGIN_L - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{fy:.2}</text>"#,
            MARGIN_L - 8.0,
            ty + 4.0
        );
    }
    // forecast origin marker
    if m > 0 {
        let ox = px(0.0);
        let _ = writeln!(
            svg,
            r##"<line x1="{ox:.2}" y1="{MARGIN_T}" x2="{ox:.2}" y2="{:.2}" stroke="#bbbbbb" stroke-dasharray="3,3"/>"##,
            HEIGHT - MARGIN_B
        );
    }

    if m > 0 {
        let pts: Vec<(f64, f64)> = history
            .iter()
            .enumerate()
            .map(|(i, &v)| (px(i as f64 - m as f64), py(v)))
            .collect();
        polyline(&mut svg, &pts, HISTORY_COLOR, false);
    }
    let truth_pts: Vec<(f64, f64)> =
        truth.iter().enumerate().map(|(i, &v)| (px(i as f64), py(v))).collect();
    polyline(&mut svg, &truth_pts, TRUTH_COLOR, false);
    for (idx, p) in predictions.iter().enumerate() {
        let pts: Vec<(f64, f64)> =
            p.values.iter().enumerate().map(|(i, &v)| (px(i as f64), py(v))).collect();
        polyline(&mut svg, &pts, MODEL_COLORS[idx % MODEL_COLORS.len()], true);
    }

    // legend, top-left inside the frame
    let mut entries: Vec<(&str, String)> = Vec::new();
    if m > 0 {
        entries.push((HISTORY_COLOR, "history".to_string()));
    }
    entries.push((TRUTH_COLOR, "truth".to_string()));
    for (idx, p) in predictions.iter().enumerate() {
        entries.push((MODEL_COLORS[idx % MODEL_COLORS.len()], escape(&p.label)));
    }
    for (row, (color, label)) in entries.iter().enumerate() {
        let y = MARGIN_T + 16.0 + row as f64 * 16.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
            MARGIN_L + 10.0,
            y - 4.0,
            MARGIN_L + 34.0,
            y - 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{y:.2}" font-family="sans-serif" font-size="12">{label}</text>"#,
            MARGIN_L + 40.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes one window's series as an SVG plot. Every prediction must match
/// the truth horizon; the history may be empty.
pub fn emit_plot(
    history: &[f64],
    truth: &[f64],
    predictions: &[PlotSeries],
    path: &Path,
) -> Result<()> {
    if truth.is_empty() {
        return Err(Error::TooShort { required: 1, actual: 0 });
    }
    for p in predictions {
        if p.values.len() != truth.len() {
            return Err(Error::LengthMismatch { left: truth.len(), right: p.values.len() });
        }
    }
    std::fs::write(path, render(history, truth, predictions))?;
    Ok(())
}

/// Picks the first test window and a seeded random one for a dataset, with
/// forecasts from every configured model at the grid's first noise level
/// and horizon. Models that fail to fit are left off the plot.
pub fn picked_windows(config: &GridConfig, dataset: &str) -> Result<(PlotBundle, PlotBundle)> {
    config.validate()?;
    let m = config.m;
    let n = config.horizons[0];
    let sigma = config.sigmas[0];
    let max_horizon = *config.horizons.iter().max().expect("validated nonempty");

    let ds = prepare_dataset(dataset, m, max_horizon)?;
    let noisy = add_noise(
        &ds.series,
        &NoiseSpec { sigma, seed: noise_seed(config.seed, &ds.name, sigma) },
    )?;
    let train = noisy.slice(0, ds.train_len)?;
    let starts = super::test_window_starts(noisy.len(), ds.train_len, m, n)?;

    let mut fitted = Vec::new();
    for model in &config.models {
        let seed = cell_seed(config.seed, &ds.name, model, sigma, n, 0);
        if let Ok(f) = fit_model(model, &train, m, n, seed, config) {
            fitted.push((model.clone(), f));
        }
    }

    let first_start = *starts.start();
    let span = starts.end() - starts.start() + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(&[
        &config.seed.to_le_bytes(),
        b"plot",
        dataset.as_bytes(),
    ]));
    let random_start = starts.start() + rng.gen_range(0..span);

    let bundle = |start: usize, tag: &str| -> Result<PlotBundle> {
        let mut predictions = Vec::new();
        for (label, f) in &fitted {
            predictions.push(PlotSeries {
                label: label.clone(),
                values: predict_window(f, &noisy, start, m, n)?,
            });
        }
        Ok(PlotBundle {
            name: format!("{}_{tag}", super::demo::dataset_stem(dataset)),
            history: noisy.values[start..start + m].to_vec(),
            truth: noisy.values[start + m..start + m + n].to_vec(),
            predictions,
        })
    };
    Ok((bundle(first_start, "first")?, bundle(random_start, "random")?))
}
