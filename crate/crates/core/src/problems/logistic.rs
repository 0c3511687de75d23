//! Binary logistic regression over a sparse dataset.

use super::{SingleLevelProblem, SparseDataset};
use crate::Vector;

/// Finite-sum logistic loss: `f_i(x) = log(1 + exp(−y_i ⟨a_i, x⟩))`.
///
/// Each per-sample loss is non-negative, so 0 is a valid lower bound; the
/// per-sample smoothness is `‖a_i‖²/4`.
pub struct LogisticProblem {
    data: SparseDataset,
    smoothness: f64,
}

/// `log(1 + e^z)` without overflow for large `|z|`.
fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Logistic sigmoid `1 / (1 + e^{−z})`, evaluated stably.
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Build the logistic-loss problem for a nonempty dataset.
pub fn logistic_problem(data: SparseDataset) -> LogisticProblem {
    assert!(!data.rows.is_empty(), "dataset must be nonempty");
    let smoothness = data
        .rows
        .iter()
        .map(|r| r.norm_squared() / 4.0)
        .fold(0.0, f64::max);
    LogisticProblem { data, smoothness }
}

impl SingleLevelProblem for LogisticProblem {
    fn n_samples(&self) -> usize {
        self.data.rows.len()
    }

    fn dim(&self) -> usize {
        self.data.dim
    }

    fn sample_value(&self, i: usize, x: &Vector) -> f64 {
        let row = &self.data.rows[i];
        log1p_exp(-row.label * row.dot(x))
    }

    fn sample_grad(&self, i: usize, x: &Vector) -> Vector {
        let row = &self.data.rows[i];
        let margin = row.label * row.dot(x);
        // ∇f_i = −y_i σ(−y_i⟨a_i,x⟩) a_i
        let coeff = -row.label * sigmoid(-margin);
        let mut g = Vector::zeros(x.len());
        for &(j, v) in &row.features {
            g[j] = coeff * v;
        }
        g
    }

    fn sample_lower_bound(&self, _i: usize) -> f64 {
        0.0
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.smoothness)
    }

    fn name(&self) -> &str {
        "logistic"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{finite_diff_grad, parse_sparse_text};
    use crate::rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn value_at_origin_is_log_two() {
        let ds = parse_sparse_text("1 0:1 2:-0.5\n-1 1:2").unwrap();
        let p = logistic_problem(ds);
        let x = Vector::zeros(p.dim());
        for i in 0..p.n_samples() {
            assert!((p.sample_value(i, &x) - 2.0_f64.ln()).abs() < 1e-15);
        }
    }

    #[test]
    fn single_row_large_margin() {
        // y=+1, a=[1], x=[10]: value = log(1 + e^{-10}).
        let ds = parse_sparse_text("1 0:1").unwrap();
        let p = logistic_problem(ds);
        let x = Vector::from_vec(vec![10.0]);
        let expected = 4.539889921686464676e-5;
        let got = p.sample_value(0, &x);
        assert!((got - expected).abs() / expected < 1e-12, "got {got}");
    }

    #[test]
    fn grad_matches_finite_differences() {
        let ds = parse_sparse_text("1 0:1.5 2:-0.25\n-1 1:1 3:0.75\n1 0:-2 3:1").unwrap();
        let p = logistic_problem(ds);
        let mut rand = rng::stream(11, &[rng::PURPOSE_PROBLEM]);
        for _ in 0..10 {
            let x = Vector::from_fn(p.dim(), |_, _| StandardNormal.sample(&mut rand));
            for i in 0..p.n_samples() {
                let analytic = p.sample_grad(i, &x);
                let numeric = finite_diff_grad(|v| p.sample_value(i, v), &x, 1e-6).unwrap();
                let rel = (&analytic - &numeric).norm() / numeric.norm().max(1e-12);
                assert!(rel <= 1e-5, "sample {i}: rel err {rel}");
            }
        }
    }

    #[test]
    fn smoothness_is_max_row_norm_over_four() {
        let ds = parse_sparse_text("1 0:3 1:4\n-1 0:1").unwrap();
        let p = logistic_problem(ds);
        assert_eq!(p.smoothness(), Some(25.0 / 4.0));
    }

    #[test]
    fn large_negative_margin_stays_finite() {
        let ds = parse_sparse_text("1 0:1").unwrap();
        let p = logistic_problem(ds);
        let x = Vector::from_vec(vec![-800.0]);
        let v = p.sample_value(0, &x);
        assert!(v.is_finite());
        assert!((v - 800.0).abs() < 1e-9);
    }
}
