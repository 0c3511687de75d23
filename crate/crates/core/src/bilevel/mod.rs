//! Alternating bi-level optimizers.
//!
//! Each upper iteration runs `T` lower-level steps on `y`, estimates a
//! hypergradient, and takes one upper step on `x`. The upper step is either
//! a clamped Polyak ratio or a backtracking search against a modified Armijo
//! rule that re-approximates the lower solution at every candidate; the
//! search ceiling is chosen by a small reset rule. SGD and Adam flavours of
//! the line-search variant share the same machinery, with the Adam form
//! measuring the sufficient decrease in the preconditioned metric.

mod driver;

pub use driver::{
    bisls_armijo_check, bisps_step, lower_loop, run_bilevel, ArmijoWitness, BilevelRng,
    BilevelRunResult, LowerLoopResult,
};

use crate::hypergrad::HypergradMethod;
use crate::step_policies::{EnvelopeSchedule, SampleMode};
use crate::{Error, Result, Vector};

/// How the search ceiling is re-seeded at each iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResetOption {
    /// Always restart from the initial ceiling.
    FromInitial,
    /// Keep the previously accepted step (monotone ceilings).
    FromPrevious,
    /// Grow the previously accepted step by `eta ≥ 1`.
    GrowPrevious { eta: f64 },
}

impl ResetOption {
    /// The reset rule: previous value, initial value, or grown previous.
    pub fn reset(&self, prev: f64, initial: f64) -> f64 {
        match *self {
            ResetOption::FromInitial => initial,
            ResetOption::FromPrevious => prev,
            ResetOption::GrowPrevious { eta } => eta * prev,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let ResetOption::GrowPrevious { eta } = *self {
            if !(eta >= 1.0) {
                return Err(Error::config(format!(
                    "reset growth factor must be at least 1, got {eta}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BilevelMethod {
    BiSps,
    BiSlsSgd,
    BiSlsAdam,
    ConstantSgd,
    ConstantAdam,
    DecayingSgd,
}

impl BilevelMethod {
    pub fn uses_line_search(self) -> bool {
        matches!(self, BilevelMethod::BiSlsSgd | BilevelMethod::BiSlsAdam)
    }

    pub fn uses_adam(self) -> bool {
        matches!(self, BilevelMethod::BiSlsAdam | BilevelMethod::ConstantAdam)
    }
}

/// Step rule for the inner (lower-level) loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerPolicy {
    /// Per-sample Polyak ratio against the exact sample minimum, capped by
    /// the (iteration-fixed) lower ceiling.
    Sps,
    /// Backtracking sufficient-decrease search on the sampled lower loss.
    LineSearch,
    Constant,
    /// Ceiling schedule value at the current upper iteration.
    Decaying,
}

/// Full configuration of one bi-level optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct BilevelConfig {
    pub method: BilevelMethod,
    pub lower_policy: LowerPolicy,
    /// Lower steps per upper iteration (`T ≥ 1`).
    pub inner_steps: u64,
    /// Upper schedule: cap `α_{b,k}`, floor seed `α_{l,0}`, decay.
    pub upper: EnvelopeSchedule,
    /// Lower schedule: cap `β_{b,k}` and decay.
    pub lower: EnvelopeSchedule,
    /// Ratio / sufficient-decrease constant shared by the upper and lower
    /// rules.
    pub sufficient_decrease: f64,
    /// Additive slack in the upper acceptance test.
    pub slack: f64,
    /// Multiplicative shrink factor of both searches, in (0, 1).
    pub backtrack: f64,
    pub reset: ResetOption,
    /// Lower refresh steps per upper search candidate.
    pub yhat_steps: u64,
    pub hypergrad: HypergradMethod,
    pub sample_mode: SampleMode,
}

impl BilevelConfig {
    /// A configuration with the documented defaults: one lower step, shared
    /// constant 0.5, zero slack, halving backtracks, grow-by-2 reset, one
    /// refresh step, CG hypergradients.
    pub fn new(
        method: BilevelMethod,
        upper: EnvelopeSchedule,
        lower: EnvelopeSchedule,
        dim_y: usize,
    ) -> Self {
        let lower_policy = match method {
            BilevelMethod::BiSps => LowerPolicy::Sps,
            BilevelMethod::BiSlsSgd | BilevelMethod::BiSlsAdam => LowerPolicy::LineSearch,
            BilevelMethod::ConstantSgd | BilevelMethod::ConstantAdam => LowerPolicy::Constant,
            BilevelMethod::DecayingSgd => LowerPolicy::Decaying,
        };
        BilevelConfig {
            method,
            lower_policy,
            inner_steps: 1,
            upper,
            lower,
            sufficient_decrease: 0.5,
            slack: 0.0,
            backtrack: 0.5,
            reset: ResetOption::GrowPrevious { eta: 2.0 },
            yhat_steps: 1,
            hypergrad: HypergradMethod::default_cg(dim_y),
            sample_mode: SampleMode::SameSample,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.inner_steps == 0 {
            return Err(Error::config("inner step count must be at least 1"));
        }
        if self.yhat_steps == 0 {
            return Err(Error::config("refresh step count must be at least 1"));
        }
        if !(self.sufficient_decrease > 0.0) {
            return Err(Error::config("sufficient-decrease constant must be positive"));
        }
        if !(self.slack >= 0.0) {
            return Err(Error::config("slack must be non-negative"));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::config(format!(
                "backtrack factor must lie strictly in (0,1), got {}",
                self.backtrack
            )));
        }
        self.reset.validate()
    }
}

/// Diagonal Adam accumulator for the upper variable.
///
/// The second moment is stored bias-corrected and updated through the
/// incremental form `G ← G + w_k (h∘h − G)` with `w_k = (1−β₂)/(1−β₂^k)`,
/// which is algebraically the raw accumulator divided by its correction
/// denominator but never re-corrects an already corrected value, so a
/// constant input is a numerical fixed point: it comes back exact at every
/// step. The first moment accumulates the negative of the incoming vector;
/// callers add `α · A⁻¹ m` to the iterate, which descends.
#[derive(Debug, Clone)]
pub struct AdamState {
    momentum: Vector,
    second: Vector,
    bias_denom: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub k: u64,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        AdamState::with_params(dim, 0.9, 0.999, 1e-8)
    }

    pub fn with_params(dim: usize, beta1: f64, beta2: f64, eps: f64) -> Self {
        assert!((0.0..1.0).contains(&beta1) && (0.0..1.0).contains(&beta2));
        assert!(eps > 0.0);
        AdamState {
            momentum: Vector::zeros(dim),
            second: Vector::zeros(dim),
            bias_denom: 0.0,
            beta1,
            beta2,
            eps,
            k: 0,
        }
    }

    /// Fold one vector into both moments; returns the preconditioner
    /// diagonal `A_k = sqrt(G_k) + eps` and the updated first moment.
    pub fn update(&mut self, h: &Vector) -> (Vector, Vector) {
        self.k += 1;
        self.bias_denom = self.beta2 * self.bias_denom + (1.0 - self.beta2);
        // w_1 = 1 exactly, so the first step lands on h∘h bitwise
        let weight = (1.0 - self.beta2) / self.bias_denom;
        self.second += weight * (h.component_mul(h) - &self.second);
        let precond = self.second.map(|g| g.sqrt() + self.eps);
        self.momentum = self.beta1 * &self.momentum - (1.0 - self.beta1) * h;
        (precond, self.momentum.clone())
    }

    /// Bias-corrected second-moment diagonal.
    pub fn second_moment(&self) -> Vector {
        self.second.clone()
    }

    pub fn momentum(&self) -> &Vector {
        &self.momentum
    }
}
