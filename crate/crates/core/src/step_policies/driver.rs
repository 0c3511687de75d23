//! Sampled-gradient descent over a finite-sum problem with a pluggable
//! step-size policy.

use super::{PolicyKind, PolicyState, SampleMode};
use crate::harness::trace::{flags, TraceRecord};
use crate::problems::SingleLevelProblem;
use crate::{rng, Error, Result, Vector};
use rand::Rng as _;
use rand_chacha::ChaCha8Rng;

/// Closed ball used for projected runs in the strongly convex regime.
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: Vector,
    pub radius: f64,
}

/// Named random streams for one single-level run: one for the gradient
/// sample, one for the independent step-size sample.
pub struct SingleLevelRng {
    pub sample: ChaCha8Rng,
    pub step: ChaCha8Rng,
}

impl SingleLevelRng {
    pub fn new(seed: u64) -> Self {
        SingleLevelRng {
            sample: rng::stream(seed, &[rng::PURPOSE_SAMPLE]),
            step: rng::stream(seed, &[rng::PURPOSE_STEP]),
        }
    }
}

/// Outcome of a single-level run.
pub struct RunResult {
    pub trace: Vec<TraceRecord>,
    pub x_final: Vector,
    /// Average of the first `K` iterates (`x^0 … x^{K−1}`).
    pub x_avg: Vector,
    /// Largest sampled gradient norm observed (both samples in two-sample
    /// mode) — the empirical bound entering the convex-rate certificate.
    pub max_grad_norm: f64,
    /// The run stopped early on a non-finite loss or iterate.
    pub halted: bool,
}

/// Run `iters` iterations of `x ← x − γ_k ∇f_{i_k}(x)` under the policy.
///
/// In two-sample mode an independent sample feeds the step-size rule while
/// the gradient sample drives the update. Non-finite losses halt the run
/// with a flagged final record.
pub fn run_single_level(
    problem: &dyn SingleLevelProblem,
    policy: &mut PolicyState,
    x0: &Vector,
    iters: u64,
    rng: &mut SingleLevelRng,
    projection: Option<&Ball>,
) -> Result<RunResult> {
    if iters == 0 {
        return Err(Error::config("iteration count must be at least 1"));
    }
    if x0.len() != problem.dim() {
        return Err(Error::config(format!(
            "x0 has dimension {}, problem expects {}",
            x0.len(),
            problem.dim()
        )));
    }
    let n = problem.n_samples();
    let mut x = x0.clone();
    let mut x_sum = Vector::zeros(x.len());
    let mut averaged = 0u64;
    let mut max_grad_norm: f64 = 0.0;
    let mut trace = Vec::with_capacity(iters as usize + 1);
    let mut halted = false;

    for k in 0..iters {
        let loss = problem.full_value(&x);
        if !loss.is_finite() || x.iter().any(|v| !v.is_finite()) {
            trace.push(TraceRecord {
                k,
                loss,
                sampled_loss: loss,
                step_upper: 0.0,
                step_lower_mean: 0.0,
                grad_norm: 0.0,
                evals_upper: 0,
                evals_lower: 0,
                flags: flags::NON_FINITE_HALT,
            });
            halted = true;
            break;
        }
        x_sum += &x;
        averaged += 1;

        let grad_ix = rng.sample.random_range(0..n);
        let grad = problem.sample_grad(grad_ix, &x);
        let grad_norm = grad.norm();
        max_grad_norm = max_grad_norm.max(grad_norm);
        let sampled_loss = problem.sample_value(grad_ix, &x);

        // Quantities feeding the step-size rule; an independent sample in
        // two-sample mode.
        let (rule_ix, rule_val, rule_lb, rule_grad) = match policy.sample_mode {
            SampleMode::SameSample => (
                grad_ix,
                sampled_loss,
                problem.sample_lower_bound(grad_ix),
                grad.clone(),
            ),
            SampleMode::TwoSample => {
                let j = rng.step.random_range(0..n);
                let gj = problem.sample_grad(j, &x);
                max_grad_norm = max_grad_norm.max(gj.norm());
                (
                    j,
                    problem.sample_value(j, &x),
                    problem.sample_lower_bound(j),
                    gj,
                )
            }
        };
        let rule_grad_sq = rule_grad.norm_squared();

        let mut record_flags = 0u32;
        let mut evals = 0u64;
        let step = match policy.kind {
            PolicyKind::SpsMax => policy.sps_max_step(k, rule_val, rule_lb, rule_grad_sq),
            PolicyKind::DecSps => policy.decsps_step(k, rule_val, rule_lb, rule_grad_sq)?,
            PolicyKind::Spsb => policy.spsb_step(k, rule_val, rule_lb, rule_grad_sq),
            PolicyKind::Sls | PolicyKind::Slsb => {
                if rule_grad_sq == 0.0 {
                    // stationary sample: nothing to search over
                    policy.schedule.cap(k)
                } else {
                    let ls = policy.sls_backtrack(
                        k,
                        |gamma| {
                            let candidate = &x - gamma * &rule_grad;
                            problem.sample_value(rule_ix, &candidate)
                        },
                        rule_val,
                        rule_grad_sq,
                    )?;
                    evals = ls.evals;
                    if ls.capped {
                        record_flags |= flags::BACKTRACK_CAP;
                    }
                    ls.step
                }
            }
            PolicyKind::DecayingSgd => policy.schedule.cap(k),
            PolicyKind::Constant => policy.schedule.cap0,
        };

        x -= step * &grad;
        if let Some(ball) = projection {
            x = super::project_ball(&x, &ball.center, ball.radius);
        }

        trace.push(TraceRecord {
            k,
            loss,
            sampled_loss,
            step_upper: step,
            step_lower_mean: 0.0,
            grad_norm,
            evals_upper: evals,
            evals_lower: 0,
            flags: record_flags,
        });
    }

    if !halted {
        let final_loss = problem.full_value(&x);
        trace.push(TraceRecord {
            k: iters,
            loss: final_loss,
            sampled_loss: final_loss,
            step_upper: 0.0,
            step_lower_mean: 0.0,
            grad_norm: 0.0,
            evals_upper: 0,
            evals_lower: 0,
            flags: if final_loss.is_finite() {
                0
            } else {
                flags::NON_FINITE_HALT
            },
        });
    }

    let x_avg = if averaged > 0 {
        &x_sum / averaged as f64
    } else {
        x0.clone()
    };
    Ok(RunResult {
        trace,
        x_final: x,
        x_avg,
        max_grad_norm,
        halted,
    })
}
