//! The alternating bi-level loop and its upper-step rules.

use super::{AdamState, BilevelConfig, BilevelMethod, LowerPolicy};
use crate::harness::trace::{flags, TraceRecord};
use crate::hypergrad::{estimate_hypergrad_with, HypergradEstimate};
use crate::problems::BilevelProblem;
use crate::step_policies::{SampleMode, MAX_BACKTRACKS};
use crate::{rng, Error, Result, Vector};
use rand::Rng as _;
use rand_chacha::ChaCha8Rng;

/// Named random streams for one bi-level run.
pub struct BilevelRng {
    /// Upper-level sample draws.
    pub upper: ChaCha8Rng,
    /// Lower-level sample draws (inner loop and candidate refreshes).
    pub lower: ChaCha8Rng,
    /// Draws internal to hypergradient estimation.
    pub hyper: ChaCha8Rng,
}

impl BilevelRng {
    pub fn new(seed: u64) -> Self {
        BilevelRng {
            upper: rng::stream(seed, &[rng::PURPOSE_UPPER]),
            lower: rng::stream(seed, &[rng::PURPOSE_LOWER]),
            hyper: rng::stream(seed, &[rng::PURPOSE_HYPER]),
        }
    }
}

/// Result of one inner loop.
pub struct LowerLoopResult {
    pub y_next: Vector,
    /// Mean step over the inner iterations.
    pub mean_step: f64,
    /// Last accepted step (seeds the next search and the candidate
    /// refreshes).
    pub last_step: f64,
    /// Sufficient-decrease evaluations spent by the inner searches.
    pub evals: u64,
    /// Any inner search hit its shrink cap.
    pub capped: bool,
}

/// One Armijo acceptance, recorded so the printed inequality can be
/// re-checked after the fact.
#[derive(Debug, Clone, Copy)]
pub struct ArmijoWitness {
    pub k: u64,
    pub alpha: f64,
    /// Baseline `f(x, y⁺; φ)`.
    pub f_base: f64,
    /// Candidate `f(x̂, ŷ; φ)`.
    pub f_cand: f64,
    /// Squared hypergradient norm in the step metric (plain for SGD,
    /// `‖·‖²_{A⁻¹}` for Adam).
    pub norm_sq: f64,
    pub slack: f64,
    pub sufficient_decrease: f64,
    /// Accepted only because the shrink cap was reached.
    pub capped: bool,
}

impl ArmijoWitness {
    /// The acceptance inequality as printed.
    pub fn holds(&self) -> bool {
        self.f_cand <= self.f_base - self.sufficient_decrease * self.alpha * self.norm_sq + self.slack
    }
}

/// Run `T` lower-level steps on `y` at fixed `x`, with a fresh sample per
/// step. The ceiling `β_{b,k}` of the ratio policy stays fixed across the
/// inner steps; the line-search policy re-seeds its ceiling through the
/// reset rule instead.
pub fn lower_loop(
    problem: &dyn BilevelProblem,
    x: &Vector,
    y: &Vector,
    k: u64,
    config: &BilevelConfig,
    beta_prev: &mut f64,
    rng: &mut ChaCha8Rng,
) -> Result<LowerLoopResult> {
    let n = problem.n_lower_samples();
    let p = config.sufficient_decrease;
    let cap_k = config.lower.cap(k);
    let mut y = y.clone();
    let mut step_sum = 0.0;
    let mut last_step = *beta_prev;
    let mut evals = 0u64;
    let mut capped = false;

    for _ in 0..config.inner_steps {
        let psi = rng.random_range(0..n);
        let grad = problem.lower_grad_y(x, &y, psi);
        let grad_sq = grad.norm_squared();

        let step = match config.lower_policy {
            LowerPolicy::Sps => {
                let sample_min = problem.lower_sample_min(x, psi).ok_or_else(|| {
                    Error::config(
                        "ratio lower policy requires the per-sample minimum oracle",
                    )
                })?;
                let value = problem.lower_value(x, &y, psi);
                if grad_sq == 0.0 {
                    cap_k
                } else {
                    ((value - sample_min) / (p * grad_sq)).min(cap_k)
                }
            }
            LowerPolicy::LineSearch => {
                if grad_sq == 0.0 {
                    config.reset.reset(*beta_prev, config.lower.cap0)
                } else {
                    let value = problem.lower_value(x, &y, psi);
                    let mut beta = config.reset.reset(*beta_prev, config.lower.cap0);
                    let mut accepted = None;
                    for _ in 0..=MAX_BACKTRACKS {
                        let candidate = &y - beta * &grad;
                        let cand_value = problem.lower_value(x, &candidate, psi);
                        evals += 1;
                        if cand_value.is_finite() && cand_value <= value - p * beta * grad_sq {
                            accepted = Some(beta);
                            break;
                        }
                        beta *= config.backtrack;
                    }
                    accepted.unwrap_or_else(|| {
                        capped = true;
                        config.lower.lower_bound(k)
                    })
                }
            }
            LowerPolicy::Constant => config.lower.cap0,
            LowerPolicy::Decaying => cap_k,
        };

        y -= step * &grad;
        step_sum += step;
        last_step = step;
        *beta_prev = step;
    }

    Ok(LowerLoopResult {
        y_next: y,
        mean_step: step_sum / config.inner_steps as f64,
        last_step,
        evals,
        capped,
    })
}

/// Clamped Polyak upper step: ratio of the sampled upper gap to
/// `p‖h‖²`, sandwiched between the decayed floor and cap.
///
/// Returns the new iterate and the step used. A zero hypergradient maps the
/// ratio to `+∞`, so the cap is used and the step is a no-op.
pub fn bisps_step(
    problem: &dyn BilevelProblem,
    x: &Vector,
    y_next: &Vector,
    k: u64,
    config: &BilevelConfig,
    estimate: &HypergradEstimate,
    value_phi: usize,
) -> (Vector, f64) {
    let h = &estimate.vector;
    let h_sq = h.norm_squared();
    let value = problem.upper_value(x, y_next, value_phi);
    let bound = problem.upper_sample_lower_bound(y_next, value_phi);
    let ratio = if h_sq == 0.0 {
        f64::INFINITY
    } else {
        (value - bound) / (config.sufficient_decrease * h_sq)
    };
    let floor = config.upper.lower_bound_decayed(k);
    let cap = config.upper.cap(k);
    let alpha = floor.max(ratio).min(cap);
    (x - alpha * h, alpha)
}

/// Evaluate the modified Armijo rule for one candidate step.
///
/// Forms `x̂ = x − α · direction`, refreshes the lower candidate by
/// `yhat_steps` sampled lower steps from `y_next` at `x̂`, and tests the
/// sampled upper loss against the sufficient-decrease line with slack. The
/// same upper sample sits on both sides of the inequality. A non-finite
/// candidate loss is a rejection.
#[allow(clippy::too_many_arguments)]
pub fn bisls_armijo_check(
    problem: &dyn BilevelProblem,
    x: &Vector,
    y_next: &Vector,
    alpha: f64,
    direction: &Vector,
    norm_sq: f64,
    p: f64,
    delta: f64,
    phi: usize,
    lower_beta: f64,
    yhat_steps: u64,
    rng: &mut ChaCha8Rng,
) -> (bool, f64) {
    let x_hat = x - alpha * direction;
    let mut y_hat = y_next.clone();
    let n = problem.n_lower_samples();
    for _ in 0..yhat_steps {
        let psi = rng.random_range(0..n);
        let g = problem.lower_grad_y(&x_hat, &y_hat, psi);
        y_hat -= lower_beta * &g;
    }
    let f_base = problem.upper_value(x, y_next, phi);
    let f_cand = problem.upper_value(&x_hat, &y_hat, phi);
    if !f_cand.is_finite() {
        return (false, f_cand);
    }
    (f_cand <= f_base - p * alpha * norm_sq + delta, f_cand)
}

/// Outcome of one line-search upper step.
pub struct BislsStep {
    pub x_next: Vector,
    pub alpha: f64,
    pub evals: u64,
    pub witness: ArmijoWitness,
}

/// Backtracking upper step: the ceiling comes from the reset rule, shrinks
/// by the backtrack factor until the Armijo check accepts, and the final
/// update moves along the hypergradient (SGD) or the preconditioned
/// momentum (Adam). After [`MAX_BACKTRACKS`] shrinks the current candidate
/// is accepted with a flag.
#[allow(clippy::too_many_arguments)]
pub fn bisls_step(
    problem: &dyn BilevelProblem,
    x: &Vector,
    y_next: &Vector,
    k: u64,
    config: &BilevelConfig,
    estimate: &HypergradEstimate,
    adam: Option<&mut AdamState>,
    alpha_prev: &mut f64,
    lower_beta: f64,
    rng: &mut ChaCha8Rng,
) -> BislsStep {
    let h = &estimate.vector;
    let p = config.sufficient_decrease;

    // The preconditioner is refreshed from the current hypergradient before
    // the search; the search direction is A⁻¹h while the final Adam update
    // moves along A⁻¹m.
    let (direction, norm_sq, adam_update) = match adam {
        Some(state) => {
            let (precond, momentum) = state.update(h);
            let direction = h.component_div(&precond);
            let norm_sq = h.dot(&direction);
            (direction, norm_sq, Some((precond, momentum)))
        }
        None => (h.clone(), h.norm_squared(), None),
    };

    let mut alpha = config.reset.reset(*alpha_prev, config.upper.cap0);
    let mut evals = 0u64;
    let mut accepted = false;
    let mut f_cand = f64::NAN;
    for _ in 0..=MAX_BACKTRACKS {
        let (ok, cand) = bisls_armijo_check(
            problem,
            x,
            y_next,
            alpha,
            &direction,
            norm_sq,
            p,
            config.slack,
            estimate.phi,
            lower_beta,
            config.yhat_steps,
            rng,
        );
        evals += 1;
        f_cand = cand;
        if ok {
            accepted = true;
            break;
        }
        alpha *= config.backtrack;
    }
    // When the cap is hit the last candidate is taken, flagged; the search
    // memory keeps its pre-search value so one failed search does not
    // collapse every later ceiling.
    let capped = !accepted;
    if accepted {
        *alpha_prev = alpha;
    }

    let x_next = match &adam_update {
        Some((precond, momentum)) => x + alpha * momentum.component_div(precond),
        None => x - alpha * h,
    };
    let witness = ArmijoWitness {
        k,
        alpha,
        f_base: problem.upper_value(x, y_next, estimate.phi),
        f_cand,
        norm_sq,
        slack: config.slack,
        sufficient_decrease: p,
        capped,
    };
    BislsStep {
        x_next,
        alpha,
        evals,
        witness,
    }
}

/// Full run.
pub struct BilevelRunResult {
    pub trace: Vec<TraceRecord>,
    pub x_final: Vector,
    pub y_final: Vector,
    /// One acceptance witness per line-search iteration.
    pub witnesses: Vec<ArmijoWitness>,
    pub halted: bool,
}

/// Run `iters` upper iterations of the alternating scheme.
pub fn run_bilevel(
    problem: &dyn BilevelProblem,
    config: &BilevelConfig,
    x0: &Vector,
    y0: &Vector,
    iters: u64,
    rng: &mut BilevelRng,
) -> Result<BilevelRunResult> {
    config.validate()?;
    if iters == 0 {
        return Err(Error::config("iteration count must be at least 1"));
    }
    if x0.len() != problem.dim_x() || y0.len() != problem.dim_y() {
        return Err(Error::config("initial iterates do not match problem dimensions"));
    }
    if config.lower_policy == LowerPolicy::Sps
        && problem.lower_sample_min(x0, 0).is_none()
    {
        return Err(Error::config(
            "ratio lower policy requires the per-sample minimum oracle",
        ));
    }

    let mut x = x0.clone();
    let mut y = y0.clone();
    let mut alpha_prev = config.upper.cap0;
    let mut beta_prev = config.lower.cap0;
    let mut adam = config
        .method
        .uses_adam()
        .then(|| AdamState::new(problem.dim_x()));
    let mut trace = Vec::with_capacity(iters as usize + 1);
    let mut witnesses = Vec::new();
    let mut halted = false;

    let objective = |x: &Vector, y: &Vector| -> f64 {
        problem
            .hyper_objective(x)
            .unwrap_or_else(|| problem.upper_value_mean(x, y))
    };

    for k in 0..iters {
        let loss = objective(&x, &y);
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

        let lower = lower_loop(problem, &x, &y, k, config, &mut beta_prev, &mut rng.lower)?;
        let mut record_flags = 0u32;
        if lower.capped {
            record_flags |= flags::LOWER_BACKTRACK_CAP;
        }

        let phi = rng.upper.random_range(0..problem.n_upper_samples());
        let estimate =
            estimate_hypergrad_with(problem, &x, &lower.y_next, config.hypergrad, phi, &mut rng.hyper)?;
        if estimate.cg_capped {
            record_flags |= flags::CG_MAX_ITER;
        }
        let grad_norm = estimate.vector.norm();
        // In two-sample mode the ratio numerator uses an independent draw.
        let value_phi = match config.sample_mode {
            SampleMode::SameSample => phi,
            SampleMode::TwoSample => rng.upper.random_range(0..problem.n_upper_samples()),
        };
        let sampled_loss = problem.upper_value(&x, &lower.y_next, value_phi);

        let (x_next, alpha, evals_upper) = match config.method {
            BilevelMethod::BiSps => {
                let (x_next, alpha) =
                    bisps_step(problem, &x, &lower.y_next, k, config, &estimate, value_phi);
                (x_next, alpha, 0)
            }
            BilevelMethod::BiSlsSgd | BilevelMethod::BiSlsAdam => {
                let step = bisls_step(
                    problem,
                    &x,
                    &lower.y_next,
                    k,
                    config,
                    &estimate,
                    adam.as_mut(),
                    &mut alpha_prev,
                    lower.last_step,
                    &mut rng.lower,
                );
                if step.witness.capped {
                    record_flags |= flags::BACKTRACK_CAP;
                }
                witnesses.push(step.witness);
                (step.x_next, step.alpha, step.evals)
            }
            BilevelMethod::ConstantSgd => {
                let alpha = config.upper.cap0;
                (&x - alpha * &estimate.vector, alpha, 0)
            }
            BilevelMethod::ConstantAdam => {
                let alpha = config.upper.cap0;
                let state = adam.as_mut().expect("adam state present");
                let (precond, momentum) = state.update(&estimate.vector);
                (&x + alpha * momentum.component_div(&precond), alpha, 0)
            }
            BilevelMethod::DecayingSgd => {
                let alpha = config.upper.cap(k);
                (&x - alpha * &estimate.vector, alpha, 0)
            }
        };

        trace.push(TraceRecord {
            k,
            loss,
            sampled_loss,
            step_upper: alpha,
            step_lower_mean: lower.mean_step,
            grad_norm,
            evals_upper,
            evals_lower: lower.evals,
            flags: record_flags,
        });
        x = x_next;
        y = lower.y_next;
    }

    if !halted {
        let final_loss = objective(&x, &y);
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

    Ok(BilevelRunResult {
        trace,
        x_final: x,
        y_final: y,
        witnesses,
        halted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilevel::ResetOption;
    use crate::problems::{bilevel_quadratic, BilevelQuadratic};
    use crate::step_policies::{Decay, EnvelopeSchedule};
    use crate::Matrix;

    fn schedule(cap0: f64, decay: Decay, floor: f64) -> EnvelopeSchedule {
        EnvelopeSchedule::new(cap0, decay, floor, 1.0).unwrap()
    }

    fn base_config(method: BilevelMethod, dim_y: usize) -> BilevelConfig {
        BilevelConfig::new(
            method,
            schedule(1.0, Decay::InvSqrt, 1e-6),
            schedule(0.5, Decay::Inv, 1e-6),
            dim_y,
        )
    }

    #[test]
    fn single_constant_lower_step_is_explicit() {
        let p = bilevel_quadratic(31, 2, 3, 0.0).unwrap();
        let mut cfg = base_config(BilevelMethod::ConstantSgd, 3);
        cfg.lower_policy = LowerPolicy::Constant;
        cfg.lower.cap0 = 0.2;
        let x = Vector::from_vec(vec![0.3, -0.8]);
        let y = Vector::from_vec(vec![1.0, 0.0, -1.0]);
        let mut beta = cfg.lower.cap0;
        let mut r = rng::stream(0, &[rng::PURPOSE_LOWER]);
        let out = lower_loop(&p, &x, &y, 0, &cfg, &mut beta, &mut r).unwrap();
        // noise-free: y⁺ = y − β(Ay − Mx)
        let expected = &y - 0.2 * (p.lower_matrix() * &y - p.coupling() * &x);
        assert!((out.y_next - expected).norm() < 1e-14);
        assert_eq!(out.mean_step, 0.2);
    }

    #[test]
    fn isotropic_curvature_step_lands_on_lower_solution() {
        // A = L·I with β = 1/L reaches y*(x) in one step.
        let l = 2.5;
        let dy = 3;
        let coupling = Matrix::from_row_slice(3, 2, &[1.0, 0.0, 0.5, -1.0, 0.0, 2.0]);
        let p = BilevelQuadratic::from_parts(
            l * Matrix::identity(dy, dy),
            coupling,
            Vector::zeros(dy),
            0.1,
            vec![Vector::zeros(dy)],
            vec![Vector::zeros(dy)],
        );
        let mut cfg = base_config(BilevelMethod::ConstantSgd, dy);
        cfg.lower_policy = LowerPolicy::Constant;
        cfg.lower.cap0 = 1.0 / l;
        let x = Vector::from_vec(vec![1.0, -2.0]);
        let y = Vector::from_vec(vec![5.0, 5.0, 5.0]);
        let mut beta = cfg.lower.cap0;
        let mut r = rng::stream(0, &[rng::PURPOSE_LOWER]);
        let out = lower_loop(&p, &x, &y, 0, &cfg, &mut beta, &mut r).unwrap();
        assert!((out.y_next - p.y_star(&x).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn ratio_lower_steps_respect_curvature_floor() {
        let p = bilevel_quadratic(32, 2, 4, 0.0).unwrap();
        let mut cfg = base_config(BilevelMethod::BiSps, 4);
        cfg.inner_steps = 3;
        cfg.lower.cap0 = 10.0;
        let l = p.lower_smoothness();
        let pconst = cfg.sufficient_decrease;
        let x = Vector::from_vec(vec![0.5, 0.5]);
        let mut y = Vector::from_vec(vec![2.0, -1.0, 0.0, 1.0]);
        let mut beta = cfg.lower.cap0;
        for k in 0..20 {
            let mut r = rng::stream(k, &[rng::PURPOSE_LOWER]);
            let out = lower_loop(&p, &x, &y, k, &cfg, &mut beta, &mut r).unwrap();
            let floor = (1.0 / (2.0 * pconst * l)).min(cfg.lower.cap(k));
            assert!(
                out.mean_step >= floor * (1.0 - 1e-10),
                "k={k}: mean {} < floor {floor}",
                out.mean_step
            );
            assert!(out.mean_step <= cfg.lower.cap(k) * (1.0 + 1e-12));
            y = out.y_next;
        }
    }

    #[test]
    fn one_alternating_iteration_matches_hand_computation() {
        let p = bilevel_quadratic(33, 2, 2, 0.0).unwrap();
        let mut cfg = base_config(BilevelMethod::ConstantSgd, 2);
        cfg.lower_policy = LowerPolicy::Constant;
        cfg.lower.cap0 = 0.1;
        cfg.upper.cap0 = 0.05;
        cfg.hypergrad = crate::hypergrad::HypergradMethod::Identity;
        let x0 = Vector::from_vec(vec![1.0, 1.0]);
        let y0 = Vector::from_vec(vec![0.0, 0.0]);
        let mut r = BilevelRng::new(5);
        let res = run_bilevel(&p, &cfg, &x0, &y0, 1, &mut r).unwrap();

        // hand computation (noise-free, identity inverse-Hessian)
        let y1 = &y0 - 0.1 * (p.lower_matrix() * &y0 - p.coupling() * &x0);
        let gy = &y1 - p.target();
        let h = p.ridge() * &x0 + p.coupling().transpose() * &gy;
        let x1 = &x0 - 0.05 * &h;
        assert!((res.x_final - x1).norm() < 1e-13);
        assert!((res.y_final - y1).norm() < 1e-13);
        assert_eq!(res.trace.len(), 2);
    }

    #[test]
    fn zero_hypergradient_is_a_noop_step() {
        // ρ = 0 and y = d makes both upper partial gradients vanish.
        let dy = 2;
        let target = Vector::from_vec(vec![0.5, -0.5]);
        let p = BilevelQuadratic::from_parts(
            Matrix::identity(dy, dy),
            Matrix::identity(dy, dy),
            target.clone(),
            0.0,
            vec![Vector::zeros(dy)],
            vec![Vector::zeros(dy)],
        );
        let cfg = base_config(BilevelMethod::BiSps, dy);
        let x = target.clone();
        let est = HypergradEstimate {
            vector: Vector::zeros(dy),
            method: cfg.hypergrad,
            sampled_n: None,
            cg_iters: None,
            cg_residual: None,
            cg_capped: false,
            phi: 0,
        };
        let (x_next, alpha) = bisps_step(&p, &x, &target, 4, &cfg, &est, 0);
        assert_eq!(x_next, x);
        assert_eq!(alpha, cfg.upper.cap(4));
    }

    #[test]
    fn from_previous_reset_is_monotone() {
        let p = bilevel_quadratic(34, 3, 3, 0.1).unwrap();
        let mut cfg = base_config(BilevelMethod::BiSlsSgd, 3);
        cfg.reset = ResetOption::FromPrevious;
        cfg.upper.cap0 = 5.0;
        let mut r = BilevelRng::new(8);
        let res = run_bilevel(
            &p,
            &cfg,
            &Vector::zeros(3),
            &Vector::zeros(3),
            60,
            &mut r,
        )
        .unwrap();
        let steps: Vec<f64> = res.trace[..60].iter().map(|t| t.step_upper).collect();
        for w in steps.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "{} then {}", w[0], w[1]);
        }
    }

    #[test]
    fn accepted_steps_satisfy_the_witnessed_inequality() {
        let p = bilevel_quadratic(35, 2, 3, 0.05).unwrap();
        let mut cfg = base_config(BilevelMethod::BiSlsAdam, 3);
        cfg.upper.cap0 = 10.0;
        let mut r = BilevelRng::new(2);
        let res = run_bilevel(
            &p,
            &cfg,
            &Vector::zeros(2),
            &Vector::zeros(3),
            40,
            &mut r,
        )
        .unwrap();
        assert_eq!(res.witnesses.len(), 40);
        for w in &res.witnesses {
            if !w.capped {
                assert!(w.holds(), "iteration {}: {:?}", w.k, w);
            }
        }
    }

    #[test]
    fn identical_seeds_identical_traces() {
        let p = bilevel_quadratic(36, 2, 2, 0.2).unwrap();
        let cfg = base_config(BilevelMethod::BiSps, 2);
        let run = |seed: u64| {
            let mut r = BilevelRng::new(seed);
            run_bilevel(&p, &cfg, &Vector::zeros(2), &Vector::zeros(2), 30, &mut r)
                .unwrap()
                .trace
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }

    #[test]
    fn first_accepted_candidate_costs_one_eval() {
        // With a huge slack every candidate is accepted immediately, so the
        // step equals the reset output.
        let p = bilevel_quadratic(37, 2, 2, 0.0).unwrap();
        let mut cfg = base_config(BilevelMethod::BiSlsSgd, 2);
        cfg.slack = 1e12;
        cfg.reset = ResetOption::FromInitial;
        cfg.upper.cap0 = 3.0;
        let mut r = BilevelRng::new(1);
        let res = run_bilevel(&p, &cfg, &Vector::zeros(2), &Vector::zeros(2), 5, &mut r)
            .unwrap();
        for t in &res.trace[..5] {
            assert_eq!(t.evals_upper, 1);
            assert_eq!(t.step_upper, 3.0);
        }
    }
}
