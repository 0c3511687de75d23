//! Experiment execution: repeats, trace files, summaries.

use super::config::{ExperimentConfig, InitKind, OptimizerSpec, ProblemInstance};
use super::trace::{self, TraceRecord};
use crate::bilevel::{run_bilevel, BilevelRng};
use crate::step_policies::{run_single_level, SingleLevelRng};
use crate::{rng, Error, Result, Vector};
use rand_distr::{Distribution, StandardNormal};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Environment variable overriding the configured output directory.
pub const OUT_DIR_ENV: &str = "ADASTEP_OUT_DIR";

/// Per-repeat summary — a pure function of the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub repeat: u64,
    pub seed: u64,
    pub final_loss: f64,
    pub min_loss: f64,
    pub total_evals_upper: u64,
    pub total_evals_lower: u64,
}

/// Reduce a trace to its summary statistics.
pub fn summarize(repeat: u64, seed: u64, trace: &[TraceRecord]) -> SummaryRow {
    let final_loss = trace.last().map(|t| t.loss).unwrap_or(f64::NAN);
    let min_loss = trace.iter().map(|t| t.loss).fold(f64::INFINITY, f64::min);
    SummaryRow {
        repeat,
        seed,
        final_loss,
        min_loss,
        total_evals_upper: trace.iter().map(|t| t.evals_upper).sum(),
        total_evals_lower: trace.iter().map(|t| t.evals_lower).sum(),
    }
}

pub const SUMMARY_HEADER: &str =
    "repeat,seed,final_loss,min_loss,total_evals_upper,total_evals_lower";

pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.repeat,
            r.seed,
            trace::fmt_f64(r.final_loss),
            trace::fmt_f64(r.min_loss),
            r.total_evals_upper,
            r.total_evals_lower
        )
        .expect("writing to String cannot fail");
    }
    out
}

/// Everything a finished experiment left on disk.
pub struct RunOutput {
    pub out_dir: PathBuf,
    pub trace_paths: Vec<PathBuf>,
    pub summary_path: PathBuf,
    pub rows: Vec<SummaryRow>,
}

fn gauss_vector(seed: u64, dim: usize) -> Vector {
    let mut r = rng::stream(seed, &[rng::PURPOSE_INIT]);
    Vector::from_fn(dim, |_, _| StandardNormal.sample(&mut r))
}

fn init_vector(kind: InitKind, seed: u64, dim: usize) -> Vector {
    match kind {
        InitKind::Zeros => Vector::zeros(dim),
        InitKind::Gauss => gauss_vector(seed, dim),
    }
}

/// Run one repeat in memory and return its trace. Exposed so tests and
/// sweeps can run without touching the filesystem.
pub fn run_repeat(config: &ExperimentConfig, seed: u64) -> Result<Vec<TraceRecord>> {
    let problem = config.problem.build()?;
    run_repeat_on(&problem, config, seed)
}

/// Like [`run_repeat`] but reusing an already-built problem.
pub fn run_repeat_on(
    problem: &ProblemInstance,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<Vec<TraceRecord>> {
    match (problem, &config.optimizer) {
        (ProblemInstance::Single(p), OptimizerSpec::Single(spec)) => {
            let mut policy = spec.build_policy(p.smoothness())?;
            let x0 = init_vector(config.run.init, seed, p.dim());
            let mut streams = SingleLevelRng::new(seed);
            let res = run_single_level(
                p.as_ref(),
                &mut policy,
                &x0,
                config.run.iters,
                &mut streams,
                None,
            )?;
            Ok(res.trace)
        }
        (ProblemInstance::Bilevel(p), OptimizerSpec::Bilevel(spec)) => {
            let bconfig = spec.build_config(p.as_ref())?;
            let x0 = init_vector(config.run.init, seed, p.dim_x());
            let y0 = init_vector(config.run.init, seed.wrapping_add(1), p.dim_y());
            let mut streams = BilevelRng::new(seed);
            let res = run_bilevel(p.as_ref(), &bconfig, &x0, &y0, config.run.iters, &mut streams)?;
            Ok(res.trace)
        }
        _ => Err(Error::config("optimizer and problem arity mismatch")),
    }
}

/// Resolve the output directory: the environment override wins, then the
/// config's `run.out`.
pub fn resolve_out_dir(config: &ExperimentConfig) -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| config.run.out.clone())
}

/// Run every repeat, writing one trace CSV per repeat plus a summary CSV.
///
/// Repeat `r` is seeded `seed_base + r`. Completed traces are flushed to
/// disk even if a later repeat fails; the summary then covers the finished
/// repeats only.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput> {
    run_experiment_in(config, &resolve_out_dir(config))
}

/// [`run_experiment`] with an explicit output directory.
pub fn run_experiment_in(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutput> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let problem = config.problem.build()?;
    let mut rows = Vec::new();
    let mut trace_paths = Vec::new();
    let summary_path = out_dir.join("summary.csv");

    for repeat in 0..config.run.repeats {
        let seed = config.run.seed_base + repeat;
        let trace = match run_repeat_on(&problem, config, seed) {
            Ok(trace) => trace,
            Err(e) => {
                // flush what finished before propagating
                std::fs::write(&summary_path, summary_to_csv(&rows))?;
                return Err(e);
            }
        };
        let path = out_dir.join(format!("trace_{repeat:03}.csv"));
        trace::write_trace(&path, &trace)?;
        rows.push(summarize(repeat, seed, &trace));
        trace_paths.push(path);
    }

    std::fs::write(&summary_path, summary_to_csv(&rows))?;
    Ok(RunOutput {
        out_dir: out_dir.to_path_buf(),
        trace_paths,
        summary_path,
        rows,
    })
}
