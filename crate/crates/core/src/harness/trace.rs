//! Per-iteration trace records and their CSV form.

use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// Flag bits explaining non-default events in a record.
pub mod flags {
    /// Upper-level backtracking hit the shrink cap.
    pub const BACKTRACK_CAP: u32 = 1;
    /// A conjugate-gradient solve stopped at its iteration cap.
    pub const CG_MAX_ITER: u32 = 2;
    /// The run halted because a loss or iterate became non-finite.
    pub const NON_FINITE_HALT: u32 = 4;
    /// Lower-level backtracking hit the shrink cap.
    pub const LOWER_BACKTRACK_CAP: u32 = 8;
}

/// One optimizer iteration. Row `k` carries the pre-step loss at iterate `k`
/// together with the step taken from it; a final row at `k = K` carries the
/// end state with zero step fields, so summaries are a pure function of the
/// trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub k: u64,
    /// Full objective (or the reduced-objective oracle for bi-level runs).
    pub loss: f64,
    /// The sampled loss used by this iteration.
    pub sampled_loss: f64,
    /// Step size taken on the (upper) variable.
    pub step_upper: f64,
    /// Mean lower-level step over the inner iterations; 0 for single-level.
    pub step_lower_mean: f64,
    /// Norm of the sampled (hyper)gradient driving the step.
    pub grad_norm: f64,
    pub evals_upper: u64,
    pub evals_lower: u64,
    pub flags: u32,
}

pub const CSV_HEADER: &str =
    "k,loss,sampled_loss,step_upper,step_lower_mean,grad_norm,evals_upper,evals_lower,flags";

/// 17 significant digits — round-trip exact for 64-bit reals.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // "inf" / "-inf" / "NaN" parse back via f64::from_str
        format!("{x}")
    }
}

impl TraceRecord {
    pub fn to_csv_row(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            self.k,
            fmt_f64(self.loss),
            fmt_f64(self.sampled_loss),
            fmt_f64(self.step_upper),
            fmt_f64(self.step_lower_mean),
            fmt_f64(self.grad_norm),
            self.evals_upper,
            self.evals_lower,
            self.flags
        )
        .expect("writing to String cannot fail");
        s
    }

    pub fn from_csv_row(line: &str, lineno: usize) -> Result<Self> {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 9 {
            return Err(Error::parse(
                lineno,
                format!("expected 9 columns, found {}", cols.len()),
            ));
        }
        let int = |s: &str, what: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| Error::parse(lineno, format!("bad {what} '{s}'")))
        };
        let real = |s: &str, what: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::parse(lineno, format!("bad {what} '{s}'")))
        };
        Ok(TraceRecord {
            k: int(cols[0], "iteration")?,
            loss: real(cols[1], "loss")?,
            sampled_loss: real(cols[2], "sampled_loss")?,
            step_upper: real(cols[3], "step_upper")?,
            step_lower_mean: real(cols[4], "step_lower_mean")?,
            grad_norm: real(cols[5], "grad_norm")?,
            evals_upper: int(cols[6], "evals_upper")?,
            evals_lower: int(cols[7], "evals_lower")?,
            flags: int(cols[8], "flags")? as u32,
        })
    }
}

/// Render a full trace as CSV text (header + one row per record).
pub fn trace_to_csv(trace: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(64 * (trace.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for rec in trace {
        out.push_str(&rec.to_csv_row());
        out.push('\n');
    }
    out
}

pub fn write_trace(path: &Path, trace: &[TraceRecord]) -> Result<()> {
    std::fs::write(path, trace_to_csv(trace))?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRecord>> {
    let text = std::fs::read_to_string(path)?;
    parse_trace(&text)
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        Some((_, other)) => {
            return Err(Error::parse(1, format!("unexpected header '{other}'")));
        }
        None => return Err(Error::parse(0, "empty trace file")),
    }
    let mut out = Vec::new();
    for (ix, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        out.push(TraceRecord::from_csv_row(line, ix + 1)?);
    }
    Ok(out)
}
