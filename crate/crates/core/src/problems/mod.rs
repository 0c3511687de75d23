//! Test problems and the oracles used to verify every optimizer.
//!
//! Two capability contracts live here. [`SingleLevelProblem`] is a finite-sum
//! objective with per-sample values, gradients and lower bounds;
//! [`BilevelProblem`] adds an upper/lower split with per-sample partial
//! gradients, Hessian-vector and cross-derivative products, and (for problems
//! built here) closed-form oracles for the exact lower solution, the reduced
//! objective and its gradient.
//!
//! Problems are immutable after construction and safe to share across
//! threads; every stochastic query takes an explicit sample index, so there
//! is no hidden mutable state.

mod bilevel_quad;
mod finite_diff;
mod hyperrep;
mod logistic;
mod quadratic;
mod sparse;

pub use bilevel_quad::{bilevel_quadratic, BilevelQuadratic};
pub use finite_diff::finite_diff_grad;
pub use hyperrep::{linear_hyperrep, HyperrepDims, LinearHyperrep};
pub use logistic::{logistic_problem, LogisticProblem};
pub use quadratic::{build_quadratic_pair, QuadraticPair};
pub use sparse::{parse_sparse_text, SparseDataset, SparseRow};

use crate::Vector;

/// A finite-sum objective `f(x) = (1/n) Σ_i f_i(x)`.
///
/// Per-sample lower bounds are required (they feed the Polyak-ratio step
/// rules); the exact per-sample infimum may be used when known.
pub trait SingleLevelProblem: Send + Sync {
    fn n_samples(&self) -> usize;
    fn dim(&self) -> usize;

    /// `f_i(x)`.
    fn sample_value(&self, i: usize, x: &Vector) -> f64;
    /// `∇f_i(x)`.
    fn sample_grad(&self, i: usize, x: &Vector) -> Vector;
    /// A lower bound on `inf_x f_i(x)`.
    fn sample_lower_bound(&self, i: usize) -> f64;

    /// Largest per-sample smoothness constant, when known.
    fn smoothness(&self) -> Option<f64> {
        None
    }

    /// Exact minimizer and minimum of the full objective, when known.
    fn optimum(&self) -> Option<(Vector, f64)> {
        None
    }

    fn name(&self) -> &str;

    /// Full objective `(1/n) Σ_i f_i(x)`.
    fn full_value(&self, x: &Vector) -> f64 {
        let n = self.n_samples();
        (0..n).map(|i| self.sample_value(i, x)).sum::<f64>() / n as f64
    }

    /// Full gradient `(1/n) Σ_i ∇f_i(x)`.
    fn full_grad(&self, x: &Vector) -> Vector {
        let n = self.n_samples();
        let mut g = Vector::zeros(self.dim());
        for i in 0..n {
            g += self.sample_grad(i, x);
        }
        g / n as f64
    }
}

/// A bi-level problem: minimize `F(x) = E_φ f(x, y*(x); φ)` where `y*(x)`
/// minimizes `E_ψ g(x, y; ψ)`.
///
/// Sample indices run over finite pools, so expectations are exact finite
/// averages computable by enumeration. The lower objective is strongly convex
/// in `y` for every sample.
pub trait BilevelProblem: Send + Sync {
    fn dim_x(&self) -> usize;
    fn dim_y(&self) -> usize;
    /// Size of the upper-level sample pool (`φ` draws).
    fn n_upper_samples(&self) -> usize;
    /// Size of the lower-level sample pool (`ψ` draws).
    fn n_lower_samples(&self) -> usize;

    /// `f(x, y; φ)`.
    fn upper_value(&self, x: &Vector, y: &Vector, phi: usize) -> f64;
    /// `∇_x f(x, y; φ)`.
    fn upper_grad_x(&self, x: &Vector, y: &Vector, phi: usize) -> Vector;
    /// `∇_y f(x, y; φ)`.
    fn upper_grad_y(&self, x: &Vector, y: &Vector, phi: usize) -> Vector;

    /// `g(x, y; ψ)`.
    fn lower_value(&self, x: &Vector, y: &Vector, psi: usize) -> f64;
    /// `∇_y g(x, y; ψ)`.
    fn lower_grad_y(&self, x: &Vector, y: &Vector, psi: usize) -> Vector;
    /// Hessian-vector product `∇²_yy g(x, y; ψ) · v`.
    fn lower_hessian_vec(&self, x: &Vector, y: &Vector, psi: usize, v: &Vector) -> Vector;
    /// Cross-derivative product `∇²_xy g(x, y; ψ) · v` (maps `R^dy → R^dx`).
    fn lower_cross_vec(&self, x: &Vector, y: &Vector, psi: usize, v: &Vector) -> Vector;

    /// Strong-convexity constant of the lower objective in `y`.
    fn lower_strong_convexity(&self) -> f64;
    /// Smoothness constant of the lower objective in `y`.
    fn lower_smoothness(&self) -> f64;
    /// Smoothness bound valid at the given upper iterate. Defaults to the
    /// global constant; problems whose lower curvature depends on `x`
    /// override this.
    fn lower_smoothness_at(&self, _x: &Vector) -> f64 {
        self.lower_smoothness()
    }

    /// Exact per-sample minimum `g(x, y*_{x,ψ}; ψ)`, when available.
    fn lower_sample_min(&self, _x: &Vector, _psi: usize) -> Option<f64> {
        None
    }

    /// Lower bound on `inf_x f(x, y; φ)` at fixed `y` (feeds the upper
    /// Polyak ratio). Zero for non-negative upper losses; problems with a
    /// tighter closed form override this.
    fn upper_sample_lower_bound(&self, _y: &Vector, _phi: usize) -> f64 {
        0.0
    }

    /// Exact lower solution `y*(x)` of the expected lower objective.
    fn y_star(&self, _x: &Vector) -> Option<Vector> {
        None
    }
    /// Reduced objective `F(x) = E_φ f(x, y*(x); φ)`.
    fn hyper_objective(&self, _x: &Vector) -> Option<f64> {
        None
    }
    /// Exact gradient of the reduced objective.
    fn hyper_grad(&self, _x: &Vector) -> Option<Vector> {
        None
    }

    fn name(&self) -> &str;

    /// Expected upper value `E_φ f(x, y; φ)` by pool enumeration.
    fn upper_value_mean(&self, x: &Vector, y: &Vector) -> f64 {
        let n = self.n_upper_samples();
        (0..n).map(|p| self.upper_value(x, y, p)).sum::<f64>() / n as f64
    }

    /// Expected lower gradient `E_ψ ∇_y g(x, y; ψ)` by pool enumeration.
    fn lower_grad_y_mean(&self, x: &Vector, y: &Vector) -> Vector {
        let n = self.n_lower_samples();
        let mut g = Vector::zeros(self.dim_y());
        for p in 0..n {
            g += self.lower_grad_y(x, y, p);
        }
        g / n as f64
    }
}
