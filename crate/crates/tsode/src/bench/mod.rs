//! Experiment grid over datasets × noise levels × horizons × repeats. Each
//! cell standardizes on the training split, injects seeded noise, fits one
//! forecaster, and scores it with MAE over every stride-1 test window.
//! Results render to CSV and markdown tables, picked windows to SVG plots.

mod demo;
mod plot;

pub use demo::{demo, two_tone_readout};
pub use plot::{emit_plot, picked_windows, PlotBundle, PlotSeries};

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    fit_fcnn, fit_latent_ode, fit_lstm, Forecaster, LatentOpts, NetFitOpts, Repeater,
    SarimaForecaster, SEASONAL_PERIOD,
};
use crate::closedform::{fit_closed_form, ClosedFormModel, FitOpts};
use crate::error::{Error, Result};
use crate::series::{
    add_noise, load_csv, make_windows, mae, standardize, synth, NoiseSpec, TimeSeries,
    WindowPair,
};

pub const KNOWN_MODELS: [&str; 6] =
    ["repeater", "fcnn", "arima", "lstm", "latent_ode", "closed_form"];

/// Models whose fit depends only on the data, so one run per cell suffices
/// and the reported spread is exactly zero.
const DETERMINISTIC_MODELS: [&str; 2] = ["repeater", "arima"];

fn default_m() -> usize {
    100
}

fn default_horizons() -> Vec<usize> {
    vec![100, 250, 500]
}

fn default_sigmas() -> Vec<f64> {
    vec![0.0, 0.1, 0.2, 0.3]
}

fn default_repeats() -> usize {
    5
}

fn default_nn_epochs() -> usize {
    200
}

fn default_latent_iters() -> usize {
    500
}

fn default_modes() -> usize {
    2
}

/// Grid definition, readable from a JSON file. Datasets are synthetic names
/// (`two_tone`, `seasonal24`) or paths to CSV files with a `value` column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfig {
    pub datasets: Vec<String>,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_horizons")]
    pub horizons: Vec<usize>,
    #[serde(default = "default_sigmas")]
    pub sigmas: Vec<f64>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    pub models: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_nn_epochs")]
    pub nn_epochs: usize,
    #[serde(default = "default_latent_iters")]
    pub latent_iters: usize,
    #[serde(default = "default_modes")]
    pub modes: usize,
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        let check_nonempty = |name: &str, empty: bool| {
            if empty {
                Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: "must be nonempty".into(),
                })
            } else {
                Ok(())
            }
        };
        check_nonempty("datasets", self.datasets.is_empty())?;
        check_nonempty("models", self.models.is_empty())?;
        check_nonempty("horizons", self.horizons.is_empty())?;
        check_nonempty("sigmas", self.sigmas.is_empty())?;
        for model in &self.models {
            if !KNOWN_MODELS.contains(&model.as_str()) {
                return Err(Error::InvalidParameter {
                    name: "models".into(),
                    reason: format!("unknown model '{model}'"),
                });
            }
        }
        if self.horizons.contains(&0) {
            return Err(Error::InvalidParameter {
                name: "horizons".into(),
                reason: "must be positive".into(),
            });
        }
        if self.sigmas.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigmas".into(),
                reason: "must be finite and nonnegative".into(),
            });
        }
        if self.repeats == 0 || self.m == 0 || self.modes == 0 {
            return Err(Error::InvalidParameter {
                name: "grid".into(),
                reason: format!(
                    "repeats={}, m={}, modes={} must all be positive",
                    self.repeats, self.m, self.modes
                ),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub dataset: String,
    pub model: String,
    pub sigma: f64,
    pub horizon: usize,
    pub mae_mean: f64,
    pub mae_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailedCell {
    pub dataset: String,
    pub model: String,
    pub sigma: f64,
    pub horizon: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricTable {
    pub rows: Vec<MetricRow>,
    pub failures: Vec<FailedCell>,
}

/// FNV-1a over length-delimited parts, so cell seeds depend only on the
/// cell's own coordinates and grids stay order-independent.
fn fnv1a(parts: &[&[u8]]) -> u64 {
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for &b in *part {
            h = (h ^ u64::from(b)).wrapping_mul(PRIME);
        }
        h = (h ^ 0xff).wrapping_mul(PRIME);
    }
    h
}

fn cell_seed(
    master: u64,
    dataset: &str,
    model: &str,
    sigma: f64,
    horizon: usize,
    repeat: usize,
) -> u64 {
    fnv1a(&[
        &master.to_le_bytes(),
        dataset.as_bytes(),
        model.as_bytes(),
        &sigma.to_bits().to_le_bytes(),
        &(horizon as u64).to_le_bytes(),
        &(repeat as u64).to_le_bytes(),
    ])
}

/// Noise is seeded per (dataset, sigma) only: every model and horizon sees
/// the same corrupted series, and repeats of deterministic models coincide.
fn noise_seed(master: u64, dataset: &str, sigma: f64) -> u64 {
    fnv1a(&[
        &master.to_le_bytes(),
        b"noise",
        dataset.as_bytes(),
        &sigma.to_bits().to_le_bytes(),
    ])
}

pub(crate) struct PreparedDataset {
    pub name: String,
    /// Full series on the scale fitted to its training split.
    pub series: TimeSeries,
    pub train_len: usize,
}

const TWO_TONE_DT: f64 = 0.12;

fn load_dataset(spec: &str, count: usize) -> Result<TimeSeries> {
    match spec {
        // dt chosen so a 100-sample window is not a whole number of periods
        "two_tone" => synth(spec, count, 0.0, count as f64 * TWO_TONE_DT)?.into_scalar(),
        "seasonal24" => synth(spec, count, 0.0, count as f64)?.into_scalar(),
        path => load_csv(Path::new(path), "value"),
    }
}

pub(crate) fn prepare_dataset(spec: &str, m: usize, max_horizon: usize) -> Result<PreparedDataset> {
    let raw = load_dataset(spec, 4 * (m + max_horizon))?;
    let train_len = raw.len() * 7 / 10;
    let (_, scaler) = standardize(&raw.slice(0, train_len)?)?;
    let series = TimeSeries::new(raw.t0, raw.dt, scaler.apply(&raw.values))?;
    Ok(PreparedDataset { name: spec.to_string(), series, train_len })
}

/// Starts of every stride-1 test window: the history may reach back into
/// the training region, the target never does.
fn test_window_starts(
    len: usize,
    train_len: usize,
    m: usize,
    n: usize,
) -> Result<std::ops::RangeInclusive<usize>> {
    if train_len < m {
        return Err(Error::TooShort { required: m, actual: train_len });
    }
    if train_len + n > len {
        return Err(Error::TooShort { required: train_len + n, actual: len });
    }
    Ok((train_len - m)..=(len - m - n))
}

/// Training windows, strided so a cell never sees more than ~256 of them.
fn train_windows(train: &TimeSeries, m: usize, n: usize) -> Result<Vec<WindowPair>> {
    let len = train.len();
    if m + n > len {
        return Err(Error::TooShort { required: m + n, actual: len });
    }
    let avail = len - m - n + 1;
    make_windows(train, m, n, (avail / 256).max(1))
}

pub(crate) enum Fitted {
    /// Forecasts from the history values alone.
    Window(Box<dyn Forecaster>),
    /// Evaluated at the absolute times of the target grid.
    Global(ClosedFormModel),
}

/// The requested mode count can exceed what the spectrum offers (one tone
/// and no noise yields a single peak); fall back to the peaks found.
fn fit_closed_form_adaptive(train: &TimeSeries, k: usize, seed: u64) -> Result<ClosedFormModel> {
    let opts = FitOpts { seed, ..FitOpts::default() };
    let mut k = k;
    loop {
        match fit_closed_form(train, k, &opts) {
            Ok(report) => return Ok(report.model),
            Err(Error::TooFewPeaks { found, .. }) if found >= 1 && found < k => k = found,
            Err(err) => return Err(err),
        }
    }
}

pub(crate) fn fit_model(
    name: &str,
    train: &TimeSeries,
    m: usize,
    n: usize,
    seed: u64,
    config: &GridConfig,
) -> Result<Fitted> {
    match name {
        "repeater" => Ok(Fitted::Window(Box::new(Repeater::new(m, n)?))),
        "arima" => Ok(Fitted::Window(Box::new(SarimaForecaster::fit(
            train,
            SEASONAL_PERIOD,
            m,
            n,
        )?))),
        "fcnn" => {
            let windows = train_windows(train, m, n)?;
            let opts = NetFitOpts { epochs: config.nn_epochs, seed, ..NetFitOpts::default() };
            Ok(Fitted::Window(Box::new(fit_fcnn(&windows, m, n, &opts)?)))
        }
        "lstm" => {
            let windows = train_windows(train, m, n)?;
            let opts = NetFitOpts { epochs: config.nn_epochs, seed, ..NetFitOpts::default() };
            Ok(Fitted::Window(Box::new(fit_lstm(&windows, m, n, &opts)?)))
        }
        "latent_ode" => {
            let windows = train_windows(train, m, n)?;
            let opts = LatentOpts { iters: config.latent_iters, seed, ..LatentOpts::default() };
            Ok(Fitted::Window(Box::new(fit_latent_ode(&windows, m, n, train.dt, &opts)?.model)))
        }
        "closed_form" => {
            Ok(Fitted::Global(fit_closed_form_adaptive(train, config.modes, seed)?))
        }
        other => Err(Error::InvalidParameter {
            name: "model".into(),
            reason: format!("unknown model '{other}'"),
        }),
    }
}

pub(crate) fn predict_window(
    fitted: &Fitted,
    series: &TimeSeries,
    start: usize,
    m: usize,
    n: usize,
) -> Result<Vec<f64>> {
    match fitted {
        Fitted::Window(f) => f.predict(&series.values[start..start + m]),
        Fitted::Global(model) => {
            let times: Vec<f64> = (0..n).map(|j| series.time(start + m + j)).collect();
            model.evaluate(&times)
        }
    }
}

fn eval_mae(
    fitted: &Fitted,
    series: &TimeSeries,
    starts: std::ops::RangeInclusive<usize>,
    m: usize,
    n: usize,
) -> Result<f64> {
    let mut total = 0.0;
    let mut count = 0usize;
    for w in starts {
        let pred = predict_window(fitted, series, w, m, n)?;
        total += mae(&pred, &series.values[w + m..w + m + n])?;
        count += 1;
    }
    Ok(total / count as f64)
}

struct CellSpec {
    ds_idx: usize,
    model: String,
    sigma: f64,
    horizon: usize,
}

fn run_cell(
    config: &GridConfig,
    ds: &PreparedDataset,
    cell: &CellSpec,
) -> Result<(f64, f64)> {
    let noisy = add_noise(
        &ds.series,
        &NoiseSpec { sigma: cell.sigma, seed: noise_seed(config.seed, &ds.name, cell.sigma) },
    )?;
    let train = noisy.slice(0, ds.train_len)?;
    let starts = test_window_starts(noisy.len(), ds.train_len, config.m, cell.horizon)?;

    let deterministic = DETERMINISTIC_MODELS.contains(&cell.model.as_str());
    let reps = if deterministic { 1 } else { config.repeats };
    let mut maes = Vec::with_capacity(reps);
    for r in 0..reps {
        let seed = cell_seed(config.seed, &ds.name, &cell.model, cell.sigma, cell.horizon, r);
        let fitted = fit_model(&cell.model, &train, config.m, cell.horizon, seed, config)?;
        maes.push(eval_mae(&fitted, &noisy, starts.clone(), config.m, cell.horizon)?);
    }
    let mean = maes.iter().sum::<f64>() / maes.len() as f64;
    let std = if maes.len() < 2 {
        0.0
    } else {
        (maes.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / maes.len() as f64).sqrt()
    };
    Ok((mean, std))
}

/// Runs every cell of the grid. Cell failures land in `failures` without
/// aborting the rest; rows come back in a canonical order so equal configs
/// produce identical tables.
pub fn run_grid(config: &GridConfig) -> Result<MetricTable> {
    config.validate()?;
    let max_horizon = *config.horizons.iter().max().expect("validated nonempty");
    let prepared: Vec<PreparedDataset> = config
        .datasets
        .iter()
        .map(|name| prepare_dataset(name, config.m, max_horizon))
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for ds_idx in 0..prepared.len() {
        for model in &config.models {
            for &sigma in &config.sigmas {
                for &horizon in &config.horizons {
                    cells.push(CellSpec { ds_idx, model: model.clone(), sigma, horizon });
                }
            }
        }
    }

    let outcomes: Vec<Result<(f64, f64)>> = cells
        .par_iter()
        .map(|cell| run_cell(config, &prepared[cell.ds_idx], cell))
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (cell, outcome) in cells.iter().zip(outcomes) {
        let dataset = prepared[cell.ds_idx].name.clone();
        match outcome {
            Ok((mae_mean, mae_std)) => rows.push(MetricRow {
                dataset,
                model: cell.model.clone(),
                sigma: cell.sigma,
                horizon: cell.horizon,
                mae_mean,
                mae_std,
            }),
            Err(err) => failures.push(FailedCell {
                dataset,
                model: cell.model.clone(),
                sigma: cell.sigma,
                horizon: cell.horizon,
                reason: err.to_string(),
            }),
        }
    }
    let key = |d: &String, m: &String, s: f64, h: usize| {
        (d.clone(), m.clone(), s.to_bits(), h)
    };
    rows.sort_by_key(|r| key(&r.dataset, &r.model, r.sigma, r.horizon));
    failures.sort_by_key(|f| key(&f.dataset, &f.model, f.sigma, f.horizon));
    Ok(MetricTable { rows, failures })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

/// Three decimals with halves rounded away from zero: 0.5049 -> "0.505".
fn fmt3(v: f64) -> String {
    format!("{:.3}", (v * 1000.0).round() / 1000.0)
}

fn markdown(table: &MetricTable) -> String {
    let mut out = String::from("# Forecast MAE (mean ± std)\n");
    let rows = &table.rows;
    let mut i = 0;
    while i < rows.len() {
        let dataset = &rows[i].dataset;
        let model = &rows[i].model;
        let span = rows[i..]
            .iter()
            .take_while(|r| &r.dataset == dataset && &r.model == model)
            .count();
        let block = &rows[i..i + span];
        i += span;

        let mut horizons: Vec<usize> = block.iter().map(|r| r.horizon).collect();
        horizons.sort_unstable();
        horizons.dedup();
        let mut sigmas: Vec<f64> = block.iter().map(|r| r.sigma).collect();
        sigmas.sort_by_key(|s| s.to_bits());
        sigmas.dedup();

        out.push_str(&format!("\n## {dataset} / {model}\n\n"));
        out.push_str("| sigma |");
        for h in &horizons {
            out.push_str(&format!(" {h} points |"));
        }
        out.push('\n');
        out.push_str("|---|");
        out.push_str(&"---|".repeat(horizons.len()));
        out.push('\n');
        for &sigma in &sigmas {
            out.push_str(&format!("| {sigma} |"));
            for &h in &horizons {
                let cell = block
                    .iter()
                    .find(|r| r.sigma == sigma && r.horizon == h)
                    .map(|r| format!("{} ± {}", fmt3(r.mae_mean), fmt3(r.mae_std)))
                    .unwrap_or_else(|| "n/a".into());
                out.push_str(&format!(" {cell} |"));
            }
            out.push('\n');
        }
    }
    if !table.failures.is_empty() {
        out.push_str("\n## Failed cells\n\n");
        for f in &table.failures {
            out.push_str(&format!(
                "- {} / {} at sigma={}, horizon={}: {}\n",
                f.dataset, f.model, f.sigma, f.horizon, f.reason
            ));
        }
    }
    out
}

pub fn emit_table(table: &MetricTable, format: TableFormat, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::TooShort { required: 1, actual: 0 });
    }
    match format {
        TableFormat::Csv => {
            let mut writer = csv::Writer::from_path(path)?;
            for row in &table.rows {
                writer.serialize(row)?;
            }
            writer.flush()?;
        }
        TableFormat::Markdown => std::fs::write(path, markdown(table))?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(
        datasets: &[&str],
        models: &[&str],
        sigmas: &[f64],
        horizons: &[usize],
        repeats: usize,
    ) -> GridConfig {
        GridConfig {
            datasets: datasets.iter().map(|s| s.to_string()).collect(),
            m: 100,
            horizons: horizons.to_vec(),
            sigmas: sigmas.to_vec(),
            repeats,
            models: models.iter().map(|s| s.to_string()).collect(),
            seed: 42,
            nn_epochs: 200,
            latent_iters: 500,
            modes: 2,
        }
    }

    #[test]
    fn config_json_fills_in_defaults() {
        let cfg: GridConfig = serde_json::from_str(
            r#"{"datasets": ["seasonal24"], "models": ["repeater"], "seed": 7}"#,
        )
        .unwrap();
        assert_eq!(cfg.m, 100);
        assert_eq!(cfg.horizons, vec![100, 250, 500]);
        assert_eq!(cfg.sigmas, vec![0.0, 0.1, 0.2, 0.3]);
        assert_eq!(cfg.repeats, 5);
        cfg.validate().unwrap();

        let bad = GridConfig { models: vec!["oracle".into()], ..cfg };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn repeater_rows_have_zero_spread_and_order_by_noise() {
        let cfg = config(&["seasonal24"], &["repeater"], &[0.0, 0.3], &[100], 2);
        let table = run_grid(&cfg).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert!(table.failures.is_empty());
        for row in &table.rows {
            assert_eq!(row.mae_std, 0.0);
        }
        assert!(
            table.rows[1].mae_mean > table.rows[0].mae_mean,
            "noise at 0.3 should raise repeater error: {:?}",
            table.rows
        );
    }

    #[test]
    fn default_sized_grid_enumerates_24_cells_per_model() {
        let cfg = GridConfig {
            datasets: vec!["seasonal24".into(), "two_tone".into()],
            models: vec!["repeater".into()],
            seed: 1,
            ..config(&[], &[], &[0.0], &[1], 1)
        };
        let cfg = GridConfig {
            horizons: default_horizons(),
            sigmas: default_sigmas(),
            repeats: default_repeats(),
            ..cfg
        };
        let table = run_grid(&cfg).unwrap();
        // the repeater is undefined off the m = horizon diagonal; those
        // cells are recorded as failures, never dropped silently
        assert_eq!(table.rows.len() + table.failures.len(), 24);
        assert_eq!(table.rows.len(), 8);
        assert!(table.failures.iter().all(|f| f.horizon != 100));
    }

    #[test]
    fn closed_form_beats_the_repeater_on_clean_cycles() {
        let cfg = config(&["seasonal24"], &["repeater", "closed_form"], &[0.0], &[100], 1);
        let table = run_grid(&cfg).unwrap();
        assert!(table.failures.is_empty(), "failures: {:?}", table.failures);
        let get = |model: &str| {
            table.rows.iter().find(|r| r.model == model).map(|r| r.mae_mean).unwrap()
        };
        assert!(
            get("closed_form") < get("repeater"),
            "closed form {} vs repeater {}",
            get("closed_form"),
            get("repeater")
        );
    }

    #[test]
    fn same_master_seed_reproduces_the_table_bitwise() {
        let cfg = config(&["two_tone"], &["repeater", "closed_form"], &[0.2], &[100], 2);
        let a = run_grid(&cfg).unwrap();
        let b = run_grid(&cfg).unwrap();
        assert_eq!(a, b);

        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        emit_table(&a, TableFormat::Csv, &p1).unwrap();
        emit_table(&b, TableFormat::Csv, &p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn cell_failures_leave_other_rows_untouched() {
        let with_failing =
            config(&["seasonal24"], &["repeater", "closed_form"], &[0.1], &[100, 250], 1);
        let alone = config(&["seasonal24"], &["closed_form"], &[0.1], &[100, 250], 1);
        let a = run_grid(&with_failing).unwrap();
        let b = run_grid(&alone).unwrap();
        // repeater cannot cover horizon 250 with m=100
        assert_eq!(a.failures.len(), 1);
        let a_closed: Vec<_> = a.rows.iter().filter(|r| r.model == "closed_form").collect();
        let b_closed: Vec<_> = b.rows.iter().collect();
        assert_eq!(a_closed, b_closed);
    }

    #[test]
    fn csv_emits_one_line_per_row_after_the_header() {
        let table = MetricTable {
            rows: vec![MetricRow {
                dataset: "seasonal24".into(),
                model: "repeater".into(),
                sigma: 0.1,
                horizon: 100,
                mae_mean: 0.5049,
                mae_std: 0.0,
            }],
            failures: vec![],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit_table(&table, TableFormat::Csv, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "dataset,model,sigma,horizon,mae_mean,mae_std");
        assert_eq!(lines[1], "seasonal24,repeater,0.1,100,0.5049,0.0");
    }

    #[test]
    fn markdown_rounds_halves_away_and_shapes_blocks() {
        let mut rows = Vec::new();
        for &sigma in &[0.0, 0.1, 0.2, 0.3] {
            for &horizon in &[100usize, 250, 500] {
                rows.push(MetricRow {
                    dataset: "two_tone".into(),
                    model: "fcnn".into(),
                    sigma,
                    horizon,
                    mae_mean: 0.5049,
                    mae_std: 0.0005,
                });
            }
        }
        let table = MetricTable { rows, failures: vec![] };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.md");
        emit_table(&table, TableFormat::Markdown, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();

        assert!(text.contains("## two_tone / fcnn"));
        assert!(text.contains("0.505 ± 0.001"), "got:\n{text}");
        assert!(text.contains("| 100 points | 250 points | 500 points |"));
        // four sigma rows inside the block
        let data_rows = text.lines().filter(|l| l.starts_with("| 0")).count();
        assert_eq!(data_rows, 4);
    }

    #[test]
    fn empty_tables_are_rejected() {
        let table = MetricTable { rows: vec![], failures: vec![] };
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            emit_table(&table, TableFormat::Csv, &dir.path().join("x.csv")),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn seeds_separate_every_cell_coordinate() {
        let base = cell_seed(1, "a", "fcnn", 0.1, 100, 0);
        assert_ne!(base, cell_seed(2, "a", "fcnn", 0.1, 100, 0));
        assert_ne!(base, cell_seed(1, "b", "fcnn", 0.1, 100, 0));
        assert_ne!(base, cell_seed(1, "a", "lstm", 0.1, 100, 0));
        assert_ne!(base, cell_seed(1, "a", "fcnn", 0.2, 100, 0));
        assert_ne!(base, cell_seed(1, "a", "fcnn", 0.1, 250, 0));
        assert_ne!(base, cell_seed(1, "a", "fcnn", 0.1, 100, 1));
        // concatenation alone must not collide across part boundaries
        assert_ne!(
            fnv1a(&[b"ab", b"c"]),
            fnv1a(&[b"a", b"bc"]),
        );
    }
}
