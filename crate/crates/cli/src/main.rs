//! `adastep` — run, sweep, plot, and verify step-size experiments.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime numerical
//! failure, 3 verification failure.

use adastep_core::harness::{config::ExperimentConfig, plot, runner, sweep, trace, verify};
use adastep_core::Error as CoreError;
use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "adastep",
    about = "Adaptive step-size optimization benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every repeat of an experiment config, writing trace and summary CSVs.
    Run(RunArgs),
    /// Re-run a config across a grid of values for one numeric config key.
    Sweep(SweepArgs),
    /// Extract one column from trace CSVs into long-format plot data.
    Plot(PlotArgs),
    /// Run the built-in invariant battery on the bundled problems.
    Verify,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file (flat `key = value` text).
    config: PathBuf,
    /// Also write the problem descriptor next to the traces.
    #[arg(long)]
    save_problem: bool,
}

#[derive(Args)]
struct SweepArgs {
    config: PathBuf,
    /// Numeric config key to vary, e.g. `optimizer.gamma_b0`.
    #[arg(long)]
    axis: String,
    /// Comma-separated axis values, e.g. `1,10,100,1000`.
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
}

#[derive(Args)]
struct PlotArgs {
    /// Trace CSV files; each becomes one series named after its file stem.
    #[arg(required = true)]
    traces: Vec<PathBuf>,
    /// Trace column to extract.
    #[arg(long, default_value = "loss")]
    column: String,
    /// Output path for the long-format CSV.
    #[arg(long)]
    out: PathBuf,
    /// Optional SVG line chart path.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Plot log10 of the column in the SVG.
    #[arg(long)]
    log_y: bool,
}

/// Exit 1 for configuration problems, 2 for runtime failures.
fn exit_code_for(err: &anyhow::Error) -> ExitCode {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<CoreError>() {
            return match core {
                CoreError::Config(_) | CoreError::Parse { .. } => ExitCode::from(1),
                _ => ExitCode::from(2),
            };
        }
    }
    ExitCode::from(2)
}

fn cmd_run(args: &RunArgs) -> anyhow::Result<()> {
    let config = ExperimentConfig::load(&args.config)
        .with_context(|| format!("loading config '{}'", args.config.display()))?;
    let output = runner::run_experiment(&config)?;
    if args.save_problem {
        let path = output.out_dir.join("problem.txt");
        std::fs::write(&path, config.problem.to_text())?;
        println!("problem descriptor: {}", path.display());
    }
    for (row, path) in output.rows.iter().zip(&output.trace_paths) {
        println!(
            "repeat {} (seed {}): final loss {:.6e}, min loss {:.6e}, evals {}+{} -> {}",
            row.repeat,
            row.seed,
            row.final_loss,
            row.min_loss,
            row.total_evals_upper,
            row.total_evals_lower,
            path.display()
        );
    }
    println!("summary: {}", output.summary_path.display());
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let config = ExperimentConfig::load(&args.config)
        .with_context(|| format!("loading config '{}'", args.config.display()))?;
    let out_dir = runner::resolve_out_dir(&config);
    let output = sweep::sweep(&config, &args.axis, &args.values, &out_dir)?;
    for point in &output.points {
        println!(
            "{} = {}: best min loss {:.6e}",
            args.axis,
            point.value,
            point.best_min_loss()
        );
    }
    let spread = sweep::spread(&output.points, |p| p.best_min_loss());
    println!("min-loss spread (max/min across values): {spread:.4e}");
    println!("summary: {}", output.summary_path.display());
    Ok(())
}

fn cmd_plot(args: &PlotArgs) -> anyhow::Result<()> {
    let mut traces = Vec::new();
    for path in &args.traces {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let records = trace::read_trace(path)
            .with_context(|| format!("reading trace '{}'", path.display()))?;
        traces.push((name, records));
    }
    let series = plot::extract_series(&traces, &args.column)?;
    std::fs::write(&args.out, plot::series_to_csv(&series))?;
    println!("plot data: {}", args.out.display());
    if let Some(svg_path) = &args.svg {
        std::fs::write(svg_path, plot::series_to_svg(&series, args.log_y))?;
        println!("chart: {}", svg_path.display());
    }
    Ok(())
}

fn cmd_verify() -> ExitCode {
    let reports = verify::run_all();
    let mut failed = 0;
    for r in &reports {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {}: {}", r.name, r.detail);
        if !r.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("all {} checks passed", reports.len());
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} checks failed", reports.len());
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Plot(args) => cmd_plot(args),
        Command::Verify => return cmd_verify(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code_for(&err)
        }
    }
}
