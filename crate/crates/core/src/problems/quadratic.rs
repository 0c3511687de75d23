//! Two-sample quadratic problem with a closed-form optimum.

use super::SingleLevelProblem;
use crate::{rng, Error, Matrix, Result, Vector};
use nalgebra::SymmetricEigen;
use rand_distr::{Distribution, StandardNormal};

/// `f_i(x) = ½ (x − x_i*)ᵀ H_i (x − x_i*)` for `i = 1, 2`, with the full
/// optimum `(H_1 + H_2)⁻¹ (H_1 x_1* + H_2 x_2*)` stored at construction.
pub struct QuadraticPair {
    mats: [Matrix; 2],
    centers: [Vector; 2],
    smoothness: f64,
    optimum: Vector,
    f_star: f64,
}

impl QuadraticPair {
    pub fn matrix(&self, i: usize) -> &Matrix {
        &self.mats[i]
    }

    pub fn center(&self, i: usize) -> &Vector {
        &self.centers[i]
    }
}

/// Symmetric positive-definite matrix with a log-compressed spectrum:
/// `Q · Diag(log(1 + λ)) · Qᵀ` where `(λ, Q)` is the eigendecomposition of
/// `PᵀP` and `P` has standard-normal entries.
///
/// A numerically singular draw is resampled on a fresh stream (tagged by the
/// attempt counter), at most 10 times.
pub(crate) fn spd_log_spectrum(seed: u64, tag: u64, dim: usize) -> Result<Matrix> {
    for attempt in 0..10u64 {
        let mut r = rng::stream(seed, &[rng::PURPOSE_PROBLEM, tag, attempt]);
        let p = Matrix::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut r));
        let gram = p.transpose() * &p;
        let eig = SymmetricEigen::new(gram);
        let lmax = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
        let lmin = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
        if lmin <= 1e-10 * lmax.max(1.0) {
            continue;
        }
        let d = Matrix::from_diagonal(&eig.eigenvalues.map(|l| (1.0 + l).ln()));
        return Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose());
    }
    Err(Error::numerical(format!(
        "failed to draw a non-singular spectrum after 10 attempts (seed {seed}, tag {tag})"
    )))
}

/// Build the two-sample quadratic problem. `dim ≥ 2`.
pub fn build_quadratic_pair(seed: u64, dim: usize) -> Result<QuadraticPair> {
    assert!(dim >= 2, "quadratic pair needs dim >= 2");
    let mut center_rng = rng::stream(seed, &[rng::PURPOSE_PROBLEM, 0]);
    let centers = [
        Vector::from_fn(dim, |_, _| StandardNormal.sample(&mut center_rng)),
        Vector::from_fn(dim, |_, _| StandardNormal.sample(&mut center_rng)),
    ];
    let mats = [
        spd_log_spectrum(seed, 1, dim)?,
        spd_log_spectrum(seed, 2, dim)?,
    ];

    let smoothness = mats
        .iter()
        .map(|h| {
            SymmetricEigen::new(h.clone())
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::MIN, f64::max)
        })
        .fold(f64::MIN, f64::max);

    let sum = &mats[0] + &mats[1];
    let rhs = &mats[0] * &centers[0] + &mats[1] * &centers[1];
    let optimum = sum
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::numerical("singular H_1 + H_2"))?;

    let mut problem = QuadraticPair {
        mats,
        centers,
        smoothness,
        optimum,
        f_star: 0.0,
    };
    problem.f_star = problem.full_value(&problem.optimum.clone());
    Ok(problem)
}

impl SingleLevelProblem for QuadraticPair {
    fn n_samples(&self) -> usize {
        2
    }

    fn dim(&self) -> usize {
        self.centers[0].len()
    }

    fn sample_value(&self, i: usize, x: &Vector) -> f64 {
        let d = x - &self.centers[i];
        0.5 * d.dot(&(&self.mats[i] * &d))
    }

    fn sample_grad(&self, i: usize, x: &Vector) -> Vector {
        &self.mats[i] * (x - &self.centers[i])
    }

    fn sample_lower_bound(&self, _i: usize) -> f64 {
        0.0
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.smoothness)
    }

    fn optimum(&self) -> Option<(Vector, f64)> {
        Some((self.optimum.clone(), self.f_star))
    }

    fn name(&self) -> &str {
        "quadratic_pair"
    }
}
