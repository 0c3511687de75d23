//! Hypergradient estimation for bi-level problems.
//!
//! The estimator assembles `∇_x f − ∇²_xy g · v` where `v` approximates
//! `[∇²_yy g]⁻¹ ∇_y f`. Three routes for `v` are provided: a conjugate
//! gradient solve against a sampled Hessian, a randomized truncated
//! Neumann series, and the identity shortcut `v = ∇_y f`.

use crate::problems::BilevelProblem;
use crate::{rng as streams, Error, Result, Vector};
use rand::Rng as _;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HypergradMethod {
    ConjugateGradient { tol: f64, max_iter: usize },
    /// Truncated-series estimator with `n` terms.
    Neumann { n: usize },
    Identity,
}

impl HypergradMethod {
    /// Conjugate gradient with the default tolerance and an iteration cap
    /// equal to the lower-level dimension.
    pub fn default_cg(dim_y: usize) -> Self {
        HypergradMethod::ConjugateGradient {
            tol: 1e-10,
            max_iter: dim_y,
        }
    }
}

/// An estimated hypergradient plus solver metadata.
#[derive(Debug, Clone)]
pub struct HypergradEstimate {
    pub vector: Vector,
    pub method: HypergradMethod,
    /// Number of product factors drawn by the series estimator.
    pub sampled_n: Option<u64>,
    pub cg_iters: Option<u64>,
    pub cg_residual: Option<f64>,
    /// The conjugate gradient solve stopped at its iteration cap.
    pub cg_capped: bool,
    /// Upper-level sample used for both partial gradients.
    pub phi: usize,
}

/// Result of a conjugate-gradient solve.
#[derive(Debug, Clone)]
pub struct CgSolution {
    pub x: Vector,
    pub iters: u64,
    /// True residual norm `‖A x − b‖` at exit.
    pub residual: f64,
    pub converged: bool,
}

/// Conjugate gradient for a symmetric positive-definite operator.
///
/// Stops when the residual norm falls to `tol · ‖b‖` or after `max_iter`
/// iterations (the best iterate is returned and flagged). Non-finite
/// intermediates are an error naming the iteration.
pub fn cg_solve<F>(apply: F, b: &Vector, tol: f64, max_iter: usize) -> Result<CgSolution>
where
    F: Fn(&Vector) -> Vector,
{
    assert!(tol > 0.0 && max_iter >= 1, "invalid CG parameters");
    let threshold = tol * b.norm();
    let mut x = Vector::zeros(b.len());
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs = r.norm_squared();
    let mut iters = 0u64;

    while rs.sqrt() > threshold && iters < max_iter as u64 {
        let hp = apply(&p);
        let denom = p.dot(&hp);
        if !denom.is_finite() || denom <= 0.0 {
            return Err(Error::numerical(format!(
                "conjugate gradient broke down at iteration {} (pᵀHp = {denom})",
                iters + 1
            )));
        }
        let alpha = rs / denom;
        x += alpha * &p;
        r -= alpha * &hp;
        let rs_next = r.norm_squared();
        if !rs_next.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite residual at conjugate-gradient iteration {}",
                iters + 1
            )));
        }
        p = &r + (rs_next / rs) * &p;
        rs = rs_next;
        iters += 1;
    }

    let residual = (apply(&x) - b).norm();
    Ok(CgSolution {
        x,
        iters,
        residual,
        converged: residual <= threshold.max(f64::EPSILON * b.norm()),
    })
}

/// Randomized truncated-series application of an approximate inverse:
/// draws `n̄` uniform on `{0, …, n−1}`, applies `(I − H_ψ/L)` to `b` that
/// many times with a fresh sample per factor, and scales by `n/L`.
///
/// The empty product (`n̄ = 0`) is the identity, which makes the estimator
/// unbiased for the `n`-term truncated geometric series of `H⁻¹`.
pub fn neumann_inverse_apply<F>(
    mut hvp: F,
    b: &Vector,
    n: usize,
    smoothness: f64,
    rng: &mut ChaCha8Rng,
) -> (Vector, u64)
where
    F: FnMut(&mut ChaCha8Rng, &Vector) -> Vector,
{
    assert!(n >= 1, "series length must be at least 1");
    assert!(smoothness > 0.0, "smoothness bound must be positive");
    let n_bar = rng.random_range(0..n as u64);
    let mut v = b.clone();
    for _ in 0..n_bar {
        let hv = hvp(rng, &v);
        v -= hv / smoothness;
    }
    v *= n as f64 / smoothness;
    (v, n_bar)
}

/// Estimate the hypergradient at `(x, y)`, drawing the upper sample inside.
pub fn estimate_hypergrad(
    problem: &dyn BilevelProblem,
    x: &Vector,
    y: &Vector,
    method: HypergradMethod,
    rng: &mut ChaCha8Rng,
) -> Result<HypergradEstimate> {
    let phi = rng.random_range(0..problem.n_upper_samples());
    estimate_hypergrad_with(problem, x, y, method, phi, rng)
}

/// Estimate the hypergradient with a caller-chosen upper sample `phi`
/// (shared between both partial upper gradients). Fresh lower samples are
/// drawn for the cross product and for every Hessian product, in that
/// order.
pub fn estimate_hypergrad_with(
    problem: &dyn BilevelProblem,
    x: &Vector,
    y: &Vector,
    method: HypergradMethod,
    phi: usize,
    rng: &mut ChaCha8Rng,
) -> Result<HypergradEstimate> {
    let n_lower = problem.n_lower_samples();
    let grad_x = problem.upper_grad_x(x, y, phi);
    let grad_y = problem.upper_grad_y(x, y, phi);
    let psi0 = rng.random_range(0..n_lower);

    let mut sampled_n = None;
    let mut cg_iters = None;
    let mut cg_residual = None;
    let mut cg_capped = false;

    let v = match method {
        HypergradMethod::Identity => grad_y,
        HypergradMethod::ConjugateGradient { tol, max_iter } => {
            let psi = rng.random_range(0..n_lower);
            let solution = cg_solve(
                |w| problem.lower_hessian_vec(x, y, psi, w),
                &grad_y,
                tol,
                max_iter,
            )?;
            cg_iters = Some(solution.iters);
            cg_residual = Some(solution.residual);
            cg_capped = !solution.converged;
            solution.x
        }
        HypergradMethod::Neumann { n } => {
            let smoothness = problem.lower_smoothness_at(x);
            let (v, n_bar) = neumann_inverse_apply(
                |r, w| {
                    let psi = r.random_range(0..n_lower);
                    problem.lower_hessian_vec(x, y, psi, w)
                },
                &grad_y,
                n,
                smoothness,
                rng,
            );
            sampled_n = Some(n_bar);
            v
        }
    };

    let vector = grad_x - problem.lower_cross_vec(x, y, psi0, &v);
    if vector.iter().any(|c| !c.is_finite()) {
        return Err(Error::numerical("non-finite hypergradient estimate"));
    }
    Ok(HypergradEstimate {
        vector,
        method,
        sampled_n,
        cg_iters,
        cg_residual,
        cg_capped,
        phi,
    })
}

/// Exact surrogate `∇_x f − ∇²_xy g [∇²_yy g]⁻¹ ∇_y f` for a fixed sample
/// triple, solved to machine tolerance. This is the deterministic reference
/// the stochastic estimators are measured against.
pub fn exact_surrogate(
    problem: &dyn BilevelProblem,
    x: &Vector,
    y: &Vector,
    phi: usize,
    psi: usize,
) -> Result<Vector> {
    let grad_y = problem.upper_grad_y(x, y, phi);
    let solution = cg_solve(
        |w| problem.lower_hessian_vec(x, y, psi, w),
        &grad_y,
        1e-14,
        grad_y.len().max(1) * 4,
    )?;
    Ok(problem.upper_grad_x(x, y, phi) - problem.lower_cross_vec(x, y, psi, &solution.x))
}

#[allow(unused)]
fn stream_for_tests(seed: u64) -> ChaCha8Rng {
    streams::stream(seed, &[streams::PURPOSE_HYPER])
}
