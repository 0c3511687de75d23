//! Single-level step-size rules and their shared envelope structure.
//!
//! Three Polyak-ratio rules and two line-search rules are implemented:
//!
//! - a ratio step with a constant cap,
//! - a doubly-monotone recursive variant (step and cap both non-increasing),
//! - a ratio step with a decaying cap but no step monotonicity,
//! - backtracking Armijo search from a constant ceiling,
//! - backtracking Armijo search from a decaying ceiling.
//!
//! All of them keep the step between a decaying upper sequence and a floor;
//! [`envelope_clamp`] applies that sandwich explicitly for rules that need
//! it (the bi-level upper step does).

mod driver;

pub use driver::{run_single_level, Ball, RunResult, SingleLevelRng};

use crate::{Error, Result};

/// How a step-size cap shrinks with the iteration counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decay {
    /// Constant cap.
    Constant,
    /// `cap0 / √(k+1)` — the convex-rate schedule.
    InvSqrt,
    /// `cap0 / (k+1)` — the strongly-convex-rate schedule.
    Inv,
}

impl Decay {
    pub fn apply(self, value: f64, k: u64) -> f64 {
        match self {
            Decay::Constant => value,
            Decay::InvSqrt => value / ((k + 1) as f64).sqrt(),
            Decay::Inv => value / (k + 1) as f64,
        }
    }
}

/// The `(cap, floor, coefficient)` family defining every step-size policy:
/// a non-increasing cap `cap(k)`, a floor `min(floor, cap(k))`, and the
/// Polyak/Armijo coefficient dividing the sufficient-decrease ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSchedule {
    /// Initial cap (`cap(0)`).
    pub cap0: f64,
    pub decay: Decay,
    /// Constant part of the lower envelope.
    pub floor: f64,
    /// Ratio coefficient (`c` for Polyak rules, the sufficient-decrease
    /// constant for line search).
    pub coeff: f64,
}

impl EnvelopeSchedule {
    pub fn new(cap0: f64, decay: Decay, floor: f64, coeff: f64) -> Result<Self> {
        if !(cap0 > 0.0) || !(floor > 0.0) || !(coeff > 0.0) {
            return Err(Error::config(format!(
                "schedule constants must be positive (cap0={cap0}, floor={floor}, coeff={coeff})"
            )));
        }
        Ok(EnvelopeSchedule {
            cap0,
            decay,
            floor,
            coeff,
        })
    }

    /// Upper envelope at iteration `k`.
    pub fn cap(&self, k: u64) -> f64 {
        self.decay.apply(self.cap0, k)
    }

    /// Lower envelope `min(floor, cap(k))` — the floor stays constant.
    pub fn lower_bound(&self, k: u64) -> f64 {
        self.floor.min(self.cap(k))
    }

    /// Lower envelope with the floor decaying on the same schedule as the
    /// cap (the bi-level upper rule uses this form).
    pub fn lower_bound_decayed(&self, k: u64) -> f64 {
        self.decay.apply(self.floor, k).min(self.cap(k))
    }
}

/// Default floor for a policy: the curvature-derived value when the
/// smoothness constant is known and positive, otherwise the initial cap.
pub fn default_floor(kind: PolicyKind, coeff: f64, cap0: f64, l_max: Option<f64>) -> f64 {
    match (kind, l_max) {
        (PolicyKind::Spsb | PolicyKind::SpsMax | PolicyKind::DecSps, Some(l)) if l > 0.0 => {
            1.0 / (2.0 * coeff * l)
        }
        (PolicyKind::Sls | PolicyKind::Slsb, Some(l)) if l > 0.0 && coeff < 1.0 => {
            2.0 * (1.0 - coeff) / l
        }
        _ => cap0,
    }
}

/// Exact envelope sandwich: `min(max(lower(k), candidate), cap(k))`.
///
/// `f64::INFINITY` is a valid candidate and selects the cap; `0.0` selects
/// the lower bound. Ties resolve by value, so a candidate equal to a bound
/// returns that bound exactly.
pub fn envelope_clamp(schedule: &EnvelopeSchedule, k: u64, gamma_tilde: f64) -> f64 {
    debug_assert!(gamma_tilde >= 0.0);
    schedule.lower_bound(k).max(gamma_tilde).min(schedule.cap(k))
}

/// Euclidean projection onto a closed ball; identity inside.
pub fn project_ball(x: &crate::Vector, center: &crate::Vector, radius: f64) -> crate::Vector {
    assert!(radius > 0.0, "projection radius must be positive");
    let offset = x - center;
    let dist = offset.norm();
    if dist <= radius {
        x.clone()
    } else {
        center + offset * (radius / dist)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    SpsMax,
    DecSps,
    Spsb,
    Sls,
    Slsb,
    DecayingSgd,
    Constant,
}

impl PolicyKind {
    pub fn needs_line_search(self) -> bool {
        matches!(self, PolicyKind::Sls | PolicyKind::Slsb)
    }
}

/// Whether the step size is computed on the gradient sample itself or on an
/// independent second sample per iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleMode {
    #[default]
    SameSample,
    TwoSample,
}

/// Outcome of one backtracking search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearch {
    pub step: f64,
    /// Number of sufficient-decrease evaluations performed.
    pub evals: u64,
    /// The shrink cap was hit and the floor value was returned instead.
    pub capped: bool,
}

/// Hard cap on backtracking shrinks per search.
pub const MAX_BACKTRACKS: u32 = 60;

/// Mutable state for a step-size policy over one optimization run.
#[derive(Debug, Clone)]
pub struct PolicyState {
    pub kind: PolicyKind,
    pub schedule: EnvelopeSchedule,
    /// Multiplicative shrink factor for line search, in (0, 1).
    pub backtrack: f64,
    pub sample_mode: SampleMode,
    prev_step: Option<f64>,
    prev_coeff: Option<f64>,
    last_k: Option<u64>,
}

/// Ratio `(f − lb) / (c · ‖g‖²)`, with the zero-gradient case mapped to
/// `+∞` (any step is stationary for that sample, so the cap decides).
fn polyak_ratio(f_val: f64, f_lb: f64, grad_sq: f64, c: f64) -> f64 {
    debug_assert!(grad_sq >= 0.0);
    debug_assert!(f_val >= f_lb - 1e-12 * f_lb.abs().max(1.0));
    if grad_sq == 0.0 {
        f64::INFINITY
    } else {
        (f_val - f_lb) / (c * grad_sq)
    }
}

impl PolicyState {
    pub fn new(kind: PolicyKind, schedule: EnvelopeSchedule) -> Self {
        PolicyState {
            kind,
            schedule,
            backtrack: 0.5,
            sample_mode: SampleMode::SameSample,
            prev_step: None,
            prev_coeff: None,
            last_k: None,
        }
    }

    pub fn with_backtrack(mut self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor < 1.0) {
            return Err(Error::config(format!(
                "backtrack factor must lie strictly in (0,1), got {factor}"
            )));
        }
        self.backtrack = factor;
        Ok(self)
    }

    pub fn with_sample_mode(mut self, mode: SampleMode) -> Self {
        self.sample_mode = mode;
        self
    }

    /// Ratio step with a constant cap:
    /// `min{(f − lb)/(c‖g‖²), cap0}`.
    pub fn sps_max_step(&self, _k: u64, f_val: f64, f_lb: f64, grad_sq: f64) -> f64 {
        polyak_ratio(f_val, f_lb, grad_sq, self.schedule.coeff).min(self.schedule.cap0)
    }

    /// Doubly-monotone recursive ratio step:
    /// `γ_k = (1/c_k) min{(f − lb)/‖g‖², c_{k−1} γ_{k−1}}` with
    /// `c_k = coeff · √(k+1)`, seeded at `k = 0` by
    /// `γ_0 = (1/c_0) min{(f − lb)/‖g‖², c_0 cap0}`.
    ///
    /// Calls must arrive in iteration order; `k` skipping backwards or ahead
    /// is a state error.
    pub fn decsps_step(&mut self, k: u64, f_val: f64, f_lb: f64, grad_sq: f64) -> Result<f64> {
        let ck = self.schedule.coeff * ((k + 1) as f64).sqrt();
        let ratio = polyak_ratio(f_val, f_lb, grad_sq, 1.0);
        let step = if k == 0 {
            let c0 = ck;
            ratio.min(c0 * self.schedule.cap0) / c0
        } else {
            match (self.last_k, self.prev_step, self.prev_coeff) {
                (Some(prev_k), Some(prev_step), Some(prev_c)) if prev_k + 1 == k => {
                    ratio.min(prev_c * prev_step) / ck
                }
                _ => {
                    return Err(Error::State(format!(
                        "recursive step at k={k} requires the step at k={} first",
                        k.wrapping_sub(1)
                    )))
                }
            }
        };
        self.last_k = Some(k);
        self.prev_step = Some(step);
        self.prev_coeff = Some(ck);
        Ok(step)
    }

    /// Ratio step with a decaying cap and no recursion:
    /// `min{(f − lb)/(c‖g‖²), cap(k)}`.
    pub fn spsb_step(&self, k: u64, f_val: f64, f_lb: f64, grad_sq: f64) -> f64 {
        polyak_ratio(f_val, f_lb, grad_sq, self.schedule.coeff).min(self.schedule.cap(k))
    }

    /// Backtracking Armijo search starting from `cap(k)`.
    ///
    /// `probe(γ)` evaluates the sampled loss at the candidate point
    /// `x − γ g`. The candidate is accepted once
    /// `probe(γ) ≤ f_val − coeff · γ · grad_sq`; otherwise the step shrinks
    /// by the backtrack factor. After [`MAX_BACKTRACKS`] shrinks the floor
    /// value is returned with `capped` set.
    pub fn sls_backtrack<F>(
        &self,
        k: u64,
        mut probe: F,
        f_val: f64,
        grad_sq: f64,
    ) -> Result<LineSearch>
    where
        F: FnMut(f64) -> f64,
    {
        debug_assert!(grad_sq > 0.0, "line search requires a non-zero gradient");
        let mut gamma = self.schedule.cap(k);
        let mut evals = 0u64;
        for _ in 0..=MAX_BACKTRACKS {
            let candidate = probe(gamma);
            evals += 1;
            if !candidate.is_finite() {
                return Err(Error::numerical(format!(
                    "line-search probe returned {candidate} at step {gamma}"
                )));
            }
            if candidate <= f_val - self.schedule.coeff * gamma * grad_sq {
                return Ok(LineSearch {
                    step: gamma,
                    evals,
                    capped: false,
                });
            }
            gamma *= self.backtrack;
        }
        Ok(LineSearch {
            step: self.schedule.lower_bound(k),
            evals,
            capped: true,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Vector;
    use proptest::prelude::*;

    fn schedule(cap0: f64, decay: Decay, floor: f64, coeff: f64) -> EnvelopeSchedule {
        EnvelopeSchedule::new(cap0, decay, floor, coeff).unwrap()
    }

    #[test]
    fn sps_max_quadratic_ratio_is_half() {
        // f = ½(x−a)², lb = 0: ratio = ½ for any x ≠ a when c = 1.
        let st = PolicyState::new(PolicyKind::SpsMax, schedule(10.0, Decay::Constant, 10.0, 1.0));
        let x: f64 = 3.0;
        let a = 1.0;
        let f = 0.5 * (x - a).powi(2);
        let gsq = (x - a).powi(2);
        assert_eq!(st.sps_max_step(0, f, 0.0, gsq), 0.5);
    }

    #[test]
    fn sps_max_zero_gradient_takes_cap() {
        let st = PolicyState::new(PolicyKind::SpsMax, schedule(7.0, Decay::Constant, 7.0, 1.0));
        assert_eq!(st.sps_max_step(3, 1.0, 0.0, 0.0), 7.0);
    }

    #[test]
    fn sps_max_large_cap_passes_ratio_through() {
        // c = 1, cap0 = 1000, f − lb = 2, ‖g‖² = 1 → step 2.
        let st = PolicyState::new(
            PolicyKind::SpsMax,
            schedule(1000.0, Decay::Constant, 1000.0, 1.0),
        );
        assert_eq!(st.sps_max_step(0, 2.0, 0.0, 1.0), 2.0);
    }

    #[test]
    fn decsps_first_two_steps() {
        let mut st = PolicyState::new(PolicyKind::DecSps, schedule(10.0, Decay::Constant, 10.0, 1.0));
        // k = 0: c_0 = 1, ratio 0.4 → min(0.4, 10) = 0.4
        let g0 = st.decsps_step(0, 0.4, 0.0, 1.0).unwrap();
        assert_eq!(g0, 0.4);
        // k = 1: c_1 = √2, ratio 100 → min(100, 1·0.4)/√2 = 0.4/√2
        let g1 = st.decsps_step(1, 100.0, 0.0, 1.0).unwrap();
        assert!((g1 - 0.4 / 2.0_f64.sqrt()).abs() < 1e-15);
        assert!((g1 - 0.2828427124746190).abs() < 1e-15);
    }

    #[test]
    fn decsps_scaled_sequence_is_non_increasing() {
        let mut st = PolicyState::new(PolicyKind::DecSps, schedule(5.0, Decay::Constant, 5.0, 1.0));
        let mut prev = f64::INFINITY;
        let vals = [3.0, 0.8, 12.0, 0.05, 2.0, 9.0, 0.3, 1.0];
        for (k, f) in vals.iter().enumerate() {
            let g = st.decsps_step(k as u64, *f, 0.0, 1.3).unwrap();
            let ck = ((k + 1) as f64).sqrt();
            assert!(ck * g <= prev + 1e-12);
            prev = ck * g;
        }
    }

    #[test]
    fn decsps_out_of_order_is_state_error() {
        let mut st = PolicyState::new(PolicyKind::DecSps, schedule(5.0, Decay::Constant, 5.0, 1.0));
        assert!(matches!(
            st.decsps_step(2, 1.0, 0.0, 1.0),
            Err(crate::Error::State(_))
        ));
        st.decsps_step(0, 1.0, 0.0, 1.0).unwrap();
        assert!(st.decsps_step(2, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn spsb_clamp_activates_with_decay() {
        let st = PolicyState::new(PolicyKind::Spsb, schedule(2.0, Decay::InvSqrt, 2.0, 1.0));
        // huge ratio → cap(k) = 2/√(k+1)
        assert_eq!(st.spsb_step(3, 1e9, 0.0, 1e-9), 1.0);
        // small ratio passes through
        assert_eq!(st.spsb_step(3, 0.25, 0.0, 1.0), 0.25);
    }

    #[test]
    fn sls_backtrack_walks_to_five_eighths() {
        // f = ½x² at x = 1: condition holds iff γ ≤ 1; from 10 with factor ½
        // the walk is 10, 5, 2.5, 1.25, 0.625 → five evaluations.
        let st = PolicyState::new(PolicyKind::Sls, schedule(10.0, Decay::Constant, 10.0, 0.5));
        let x = 1.0f64;
        let ls = st
            .sls_backtrack(0, |g| 0.5 * (x - g * x).powi(2), 0.5 * x * x, x * x)
            .unwrap();
        assert_eq!(ls.step, 0.625);
        assert_eq!(ls.evals, 5);
        assert!(!ls.capped);
        // the accepted step satisfies the sufficient-decrease inequality
        assert!(0.5 * (x - ls.step * x).powi(2) <= 0.5 * x * x - 0.5 * ls.step * x * x);
    }

    #[test]
    fn sls_accepts_start_unchanged() {
        let st = PolicyState::new(PolicyKind::Sls, schedule(0.5, Decay::Constant, 0.5, 0.5));
        let x = 1.0f64;
        let ls = st
            .sls_backtrack(0, |g| 0.5 * (x - g * x).powi(2), 0.5, 1.0)
            .unwrap();
        assert_eq!(ls.step, 0.5);
        assert_eq!(ls.evals, 1);
    }

    #[test]
    fn sls_cap_falls_back_to_floor() {
        // probe never satisfies the condition
        let st = PolicyState::new(PolicyKind::Sls, schedule(10.0, Decay::Constant, 0.3, 0.5));
        let ls = st.sls_backtrack(0, |_| 1.0, 0.5, 1.0).unwrap();
        assert!(ls.capped);
        assert_eq!(ls.step, 0.3);
        assert_eq!(ls.evals, u64::from(MAX_BACKTRACKS) + 1);
    }

    #[test]
    fn sls_non_finite_probe_is_an_error() {
        let st = PolicyState::new(PolicyKind::Sls, schedule(10.0, Decay::Constant, 10.0, 0.5));
        assert!(st.sls_backtrack(0, |_| f64::NAN, 0.5, 1.0).is_err());
    }

    #[test]
    fn clamp_examples() {
        let s = schedule(0.2, Decay::Constant, 0.3, 1.0);
        // floor = min(0.3, 0.2) = 0.2; candidate 0.25 → 0.2
        assert_eq!(envelope_clamp(&s, 0, 0.25), 0.2);
        let s = schedule(1.0, Decay::InvSqrt, 0.05, 1.0);
        assert_eq!(envelope_clamp(&s, 0, 0.0), 0.05);
        assert_eq!(envelope_clamp(&s, 0, f64::INFINITY), 1.0);
    }

    #[test]
    fn default_floor_variants() {
        assert_eq!(default_floor(PolicyKind::Spsb, 1.0, 9.0, Some(4.0)), 0.125);
        assert_eq!(default_floor(PolicyKind::Spsb, 1.0, 9.0, None), 9.0);
        assert_eq!(default_floor(PolicyKind::Slsb, 0.1, 9.0, Some(2.0)), 0.9);
        // sufficient-decrease constant at 1 leaves no admissible interval
        assert_eq!(default_floor(PolicyKind::Sls, 1.0, 9.0, Some(2.0)), 9.0);
    }

    #[test]
    fn projection_examples() {
        let c = Vector::from_vec(vec![1.0, 1.0]);
        let inside = Vector::from_vec(vec![1.2, 0.9]);
        assert_eq!(project_ball(&inside, &c, 1.0), inside);
        let outside = Vector::from_vec(vec![3.0, 1.0]);
        let projected = project_ball(&outside, &c, 1.0);
        assert!((projected - Vector::from_vec(vec![2.0, 1.0])).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn clamp_respects_sandwich(
            cap0 in 1e-6f64..1e6,
            floor in 1e-6f64..1e6,
            tilde in 0.0f64..1e9,
            k in 0u64..10_000,
            decay_ix in 0usize..3,
        ) {
            let decay = [Decay::Constant, Decay::InvSqrt, Decay::Inv][decay_ix];
            let s = EnvelopeSchedule::new(cap0, decay, floor, 1.0).unwrap();
            let out = envelope_clamp(&s, k, tilde);
            prop_assert!(out >= s.lower_bound(k));
            prop_assert!(out <= s.cap(k));
            // lower envelope never exceeds the cap, caps are non-increasing
            prop_assert!(s.lower_bound(k) <= s.cap(k));
            if k > 0 {
                prop_assert!(s.cap(k) <= s.cap(k - 1));
            }
        }

        #[test]
        fn projection_stays_in_ball(
            x0 in -100.0f64..100.0,
            x1 in -100.0f64..100.0,
            c0 in -10.0f64..10.0,
            c1 in -10.0f64..10.0,
            r in 1e-3f64..50.0,
        ) {
            let x = Vector::from_vec(vec![x0, x1]);
            let c = Vector::from_vec(vec![c0, c1]);
            let p = project_ball(&x, &c, r);
            prop_assert!((p - &c).norm() <= r + 1e-12);
        }
    }
}
