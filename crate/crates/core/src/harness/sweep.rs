//! Parameter sweeps over one numeric config axis.

use super::config::ExperimentConfig;
use super::runner::{self, SummaryRow};
use super::trace;
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// One sweep point: the axis value and the per-repeat summaries.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub rows: Vec<SummaryRow>,
}

impl SweepPoint {
    /// Smallest per-repeat minimum loss at this point.
    pub fn best_min_loss(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.min_loss)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug)]
pub struct SweepOutput {
    pub points: Vec<SweepPoint>,
    pub summary_path: PathBuf,
}

/// Spread statistic over sweep points: max/min of a per-point scalar.
/// Infinite or NaN per-point values yield an infinite spread.
pub fn spread<F: Fn(&SweepPoint) -> f64>(points: &[SweepPoint], metric: F) -> f64 {
    let vals: Vec<f64> = points.iter().map(metric).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let max = vals.iter().cloned().fold(f64::MIN, f64::max);
    let min = vals.iter().cloned().fold(f64::MAX, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn format_axis_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

pub const SWEEP_HEADER: &str =
    "axis,value,repeat,seed,final_loss,min_loss,total_evals_upper,total_evals_lower";

/// Run the cross product of `values × repeats`, overriding `axis` in the
/// config for each point. Traces land in `value_<v>/` subdirectories; the
/// combined summary is keyed by axis value.
pub fn sweep(
    config: &ExperimentConfig,
    axis: &str,
    values: &[f64],
    out_dir: &Path,
) -> Result<SweepOutput> {
    if values.is_empty() {
        return Err(Error::config("sweep requires at least one axis value"));
    }
    let base_doc = config.to_doc();
    if base_doc.get(axis).is_none() {
        return Err(Error::config(format!(
            "sweep axis '{axis}' is not a config key"
        )));
    }

    std::fs::create_dir_all(out_dir)?;
    let mut points = Vec::new();
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');

    for &value in values {
        if !value.is_finite() {
            return Err(Error::config("sweep values must be finite"));
        }
        let mut doc = base_doc.clone();
        doc.set(axis, format_axis_value(value));
        // re-parse so type errors surface with the axis key named
        let point_config = ExperimentConfig::from_doc(&doc)?;
        let sub = out_dir.join(format!("value_{}", format_axis_value(value).replace('.', "_")));
        let output = runner::run_experiment_in(&point_config, &sub)?;
        for row in &output.rows {
            writeln!(
                csv,
                "{axis},{},{},{},{},{},{},{}",
                format_axis_value(value),
                row.repeat,
                row.seed,
                trace::fmt_f64(row.final_loss),
                trace::fmt_f64(row.min_loss),
                row.total_evals_upper,
                row.total_evals_lower
            )
            .expect("writing to String cannot fail");
        }
        points.push(SweepPoint {
            value,
            rows: output.rows,
        });
    }

    let summary_path = out_dir.join("sweep_summary.csv");
    std::fs::write(&summary_path, csv)?;
    Ok(SweepOutput {
        points,
        summary_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentConfig;

    const BASE: &str = "problem.kind = quadratic_pair\nproblem.seed = 2\n\
                        optimizer.kind = spsb\noptimizer.gamma_b0 = 1\n\
                        run.iters = 25\nrun.repeats = 2\n";

    #[test]
    fn sweep_emits_point_per_value() {
        let cfg = ExperimentConfig::from_text(BASE).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = sweep(&cfg, "optimizer.gamma_b0", &[1.0, 10.0], dir.path()).unwrap();
        assert_eq!(out.points.len(), 2);
        assert_eq!(out.points[0].rows.len(), 2);
        let text = std::fs::read_to_string(&out.summary_path).unwrap();
        assert_eq!(text.lines().count(), 1 + 4);
        assert!(text.contains("optimizer.gamma_b0,10,"));
    }

    #[test]
    fn empty_values_rejected() {
        let cfg = ExperimentConfig::from_text(BASE).unwrap();
        let dir = tempfile::tempdir().unwrap();
        assert!(sweep(&cfg, "optimizer.gamma_b0", &[], dir.path()).is_err());
    }

    #[test]
    fn non_numeric_axis_rejected() {
        let cfg = ExperimentConfig::from_text(BASE).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let err = sweep(&cfg, "optimizer.kind", &[1.0], dir.path()).unwrap_err();
        assert!(err.to_string().contains("optimizer.kind"), "{err}");
        let err = sweep(&cfg, "no.such.key", &[1.0], dir.path()).unwrap_err();
        assert!(err.to_string().contains("no.such.key"), "{err}");
    }

    #[test]
    fn spread_handles_divergence() {
        let mk = |min_loss: f64| SweepPoint {
            value: 1.0,
            rows: vec![SummaryRow {
                repeat: 0,
                seed: 0,
                final_loss: min_loss,
                min_loss,
                total_evals_upper: 0,
                total_evals_lower: 0,
            }],
        };
        let pts = vec![mk(1.0), mk(4.0)];
        assert_eq!(spread(&pts, |p| p.best_min_loss()), 4.0);
        let pts = vec![mk(1.0), mk(f64::INFINITY)];
        assert_eq!(spread(&pts, |p| p.best_min_loss()), f64::INFINITY);
    }
}
