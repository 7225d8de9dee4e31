use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tsode::bench::{
    demo, emit_plot, emit_table, picked_windows, run_grid, GridConfig, TableFormat,
};
use tsode::closedform::{fit_closed_form, FitOpts};
use tsode::linode::{load_matrix_csv, spectrum_report};
use tsode::series::load_csv;
use tsode::Result;

#[derive(Parser)]
#[command(name = "tsode", version, about = "Linear ODE forecasting toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark grid described by a JSON config file
    Bench {
        /// JSON file with datasets, models, horizons, sigmas, repeats, seed
        #[arg(long)]
        config: PathBuf,
        /// Output directory for results.csv, results.md and plots/
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named demonstration experiment
    Demo {
        /// One of: sine_recovery, two_tone_spectrum, companion, closed_form_speed
        name: String,
        /// Directory for the JSON report
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Fit a closed-form modal model to a CSV series and print the report
    FitClosed {
        /// CSV file with a time column first and a value column
        #[arg(long)]
        input: PathBuf,
        /// Number of oscillatory modes
        #[arg(long)]
        modes: usize,
        /// Name of the value column
        #[arg(long, default_value = "value")]
        column: String,
    },
    /// Report the spectrum and solution form of a system matrix
    Spectrum {
        /// CSV file holding a square matrix, no header
        #[arg(long)]
        matrix: PathBuf,
        /// Directory for spectrum.json
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn bench(config_path: &Path, out: &Path) -> Result<u8> {
    let text = fs::read_to_string(config_path)?;
    let config: GridConfig = serde_json::from_str(&text)?;
    let table = run_grid(&config)?;

    fs::create_dir_all(out)?;
    emit_table(&table, TableFormat::Csv, &out.join("results.csv"))?;
    emit_table(&table, TableFormat::Markdown, &out.join("results.md"))?;

    let plots = out.join("plots");
    fs::create_dir_all(&plots)?;
    for dataset in &config.datasets {
        let (first, random) = picked_windows(&config, dataset)?;
        for bundle in [first, random] {
            emit_plot(
                &bundle.history,
                &bundle.truth,
                &bundle.predictions,
                &plots.join(format!("{}.svg", bundle.name)),
            )?;
        }
    }

    println!("{} rows -> {}", table.rows.len(), out.join("results.csv").display());
    if table.failures.is_empty() {
        Ok(0)
    } else {
        for f in &table.failures {
            eprintln!(
                "failed cell: {} / {} at sigma={}, horizon={}: {}",
                f.dataset, f.model, f.sigma, f.horizon, f.reason
            );
        }
        Ok(2)
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Bench { config, out } => bench(&config, &out),
        Command::Demo { name, out } => {
            let (text, value) = demo(&name)?;
            println!("{text}");
            fs::create_dir_all(&out)?;
            let path = out.join(format!("{name}.json"));
            fs::write(&path, serde_json::to_string_pretty(&value)? + "\n")?;
            println!("report -> {}", path.display());
            Ok(0)
        }
        Command::FitClosed { input, modes, column } => {
            let series = load_csv(&input, &column)?;
            let report = fit_closed_form(&series, modes, &FitOpts::default())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(0)
        }
        Command::Spectrum { matrix, out } => {
            let a = load_matrix_csv(&matrix)?;
            let report = spectrum_report(&a)?;
            fs::create_dir_all(&out)?;
            let path = out.join("spectrum.json");
            fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
            for ev in &report.eigenvalues {
                println!(
                    "{:.6} {} {:.6}i",
                    ev.re,
                    if ev.im < 0.0 { "-" } else { "+" },
                    ev.im.abs()
                );
            }
            println!("solution form: {}", report.rendering);
            println!("report -> {}", path.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
