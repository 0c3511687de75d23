//! Linear hyper-representation: learn an embedding so that a ridge-regressed
//! classifier on training data does well on validation data.
//!
//! Upper variable: embedding weights `W` (features × embed). Lower variable:
//! classifier `c` (embed × targets), fit by ridge regression on `(X₂, Y₂)`;
//! the upper objective is the validation squared loss on `(X₁, Y₁)`. The
//! ridge term makes every sampled lower objective `λ`-strongly convex, and
//! the lower solution has the closed form
//! `c*(W) = (ZᵀZ/D₂ + λI)⁻¹ ZᵀY₂/D₂` with `Z = X₂W`.

use super::BilevelProblem;
use crate::{rng, Matrix, Vector};
use rand_distr::{Distribution, StandardNormal};

/// Sizes of the linear hyper-representation instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HyperrepDims {
    pub features: usize,
    pub embed: usize,
    pub targets: usize,
}

/// Rows per split (validation and training).
const ROWS: usize = 32;

pub struct LinearHyperrep {
    dims: HyperrepDims,
    lambda: f64,
    x1: Matrix,
    y1: Matrix,
    x2: Matrix,
    y2: Matrix,
    max_train_row_sq: f64,
}

fn gaussian(r: &mut rand_chacha::ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(r))
}

/// Column-major flatten.
fn to_vec(m: &Matrix) -> Vector {
    Vector::from_column_slice(m.as_slice())
}

fn to_mat(v: &Vector, rows: usize, cols: usize) -> Matrix {
    Matrix::from_column_slice(rows, cols, v.as_slice())
}

/// Build an instance with a planted linear model plus light label noise.
pub fn linear_hyperrep(seed: u64, dims: HyperrepDims, lambda: f64) -> LinearHyperrep {
    assert!(lambda > 0.0, "ridge weight must be positive");
    assert!(dims.features >= 1 && dims.embed >= 1 && dims.targets >= 1);
    let mut r = rng::stream(seed, &[rng::PURPOSE_PROBLEM, 30]);
    let x1 = gaussian(&mut r, ROWS, dims.features);
    let x2 = gaussian(&mut r, ROWS, dims.features);
    let w0 = gaussian(&mut r, dims.features, dims.embed) / (dims.features as f64).sqrt();
    let c0 = gaussian(&mut r, dims.embed, dims.targets) / (dims.embed as f64).sqrt();
    let y1 = &x1 * &w0 * &c0 + 0.1 * gaussian(&mut r, ROWS, dims.targets);
    let y2 = &x2 * &w0 * &c0 + 0.1 * gaussian(&mut r, ROWS, dims.targets);
    let max_train_row_sq = (0..ROWS)
        .map(|i| x2.row(i).norm_squared())
        .fold(0.0, f64::max);
    LinearHyperrep {
        dims,
        lambda,
        x1,
        y1,
        x2,
        y2,
        max_train_row_sq,
    }
}

impl LinearHyperrep {
    pub fn dims(&self) -> HyperrepDims {
        self.dims
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Validation target matrix (used by the shrinkage-limit check).
    pub fn validation_targets(&self) -> &Matrix {
        &self.y1
    }

    fn weights(&self, x: &Vector) -> Matrix {
        to_mat(x, self.dims.features, self.dims.embed)
    }

    fn classifier(&self, y: &Vector) -> Matrix {
        to_mat(y, self.dims.embed, self.dims.targets)
    }

    /// Closed-form ridge solution `c*(W)` as a matrix.
    pub fn classifier_star(&self, x: &Vector) -> Matrix {
        let w = self.weights(x);
        let z = &self.x2 * &w;
        let d2 = ROWS as f64;
        let gram = z.transpose() * &z / d2 + self.lambda * Matrix::identity(self.dims.embed, self.dims.embed);
        let rhs = z.transpose() * &self.y2 / d2;
        gram.lu().solve(&rhs).expect("ridge system is positive definite")
    }
}

impl BilevelProblem for LinearHyperrep {
    fn dim_x(&self) -> usize {
        self.dims.features * self.dims.embed
    }

    fn dim_y(&self) -> usize {
        self.dims.embed * self.dims.targets
    }

    fn n_upper_samples(&self) -> usize {
        ROWS
    }

    fn n_lower_samples(&self) -> usize {
        ROWS
    }

    fn upper_value(&self, x: &Vector, y: &Vector, phi: usize) -> f64 {
        let w = self.weights(x);
        let c = self.classifier(y);
        let r = self.x1.row(phi) * &w * &c - self.y1.row(phi);
        0.5 * r.norm_squared()
    }

    fn upper_grad_x(&self, x: &Vector, y: &Vector, phi: usize) -> Vector {
        let w = self.weights(x);
        let c = self.classifier(y);
        let xi = self.x1.row(phi);
        let r = &xi * &w * &c - self.y1.row(phi);
        to_vec(&(xi.transpose() * &r * c.transpose()))
    }

    fn upper_grad_y(&self, x: &Vector, y: &Vector, phi: usize) -> Vector {
        let w = self.weights(x);
        let c = self.classifier(y);
        let z = self.x1.row(phi) * &w;
        let r = &z * &c - self.y1.row(phi);
        to_vec(&(z.transpose() * r))
    }

    fn lower_value(&self, x: &Vector, y: &Vector, psi: usize) -> f64 {
        let w = self.weights(x);
        let c = self.classifier(y);
        let r = self.x2.row(psi) * &w * &c - self.y2.row(psi);
        0.5 * r.norm_squared() + 0.5 * self.lambda * c.norm_squared()
    }

    fn lower_grad_y(&self, x: &Vector, y: &Vector, psi: usize) -> Vector {
        let w = self.weights(x);
        let c = self.classifier(y);
        let z = self.x2.row(psi) * &w;
        let r = &z * &c - self.y2.row(psi);
        to_vec(&(z.transpose() * r + self.lambda * c))
    }

    fn lower_hessian_vec(&self, x: &Vector, _y: &Vector, psi: usize, v: &Vector) -> Vector {
        let w = self.weights(x);
        let vm = self.classifier(v);
        let z = self.x2.row(psi) * &w;
        to_vec(&(z.transpose() * (&z * &vm) + self.lambda * vm))
    }

    fn lower_cross_vec(&self, x: &Vector, y: &Vector, psi: usize, v: &Vector) -> Vector {
        let w = self.weights(x);
        let c = self.classifier(y);
        let vm = self.classifier(v);
        let xi = self.x2.row(psi);
        let z = &xi * &w;
        let r = &z * &c - self.y2.row(psi);
        let zv = &z * &vm;
        to_vec(&(xi.transpose() * (&r * vm.transpose() + &zv * c.transpose())))
    }

    fn lower_strong_convexity(&self) -> f64 {
        self.lambda
    }

    fn lower_smoothness(&self) -> f64 {
        // valid for embeddings with operator norm at most one
        self.lambda + self.max_train_row_sq
    }

    fn lower_smoothness_at(&self, x: &Vector) -> f64 {
        let w = self.weights(x);
        let max_z = (0..ROWS)
            .map(|i| (self.x2.row(i) * &w).norm_squared())
            .fold(0.0, f64::max);
        self.lambda + max_z
    }

    fn lower_sample_min(&self, x: &Vector, psi: usize) -> Option<f64> {
        let w = self.weights(x);
        let z = self.x2.row(psi) * &w;
        let ysq = self.y2.row(psi).norm_squared();
        Some(self.lambda * ysq / (2.0 * (self.lambda + z.norm_squared())))
    }

    fn y_star(&self, x: &Vector) -> Option<Vector> {
        Some(to_vec(&self.classifier_star(x)))
    }

    fn hyper_objective(&self, x: &Vector) -> Option<f64> {
        let w = self.weights(x);
        let c = self.classifier_star(x);
        let r = &self.x1 * &w * &c - &self.y1;
        Some(0.5 * r.norm_squared() / ROWS as f64)
    }

    fn hyper_grad(&self, x: &Vector) -> Option<Vector> {
        let w = self.weights(x);
        let c = self.classifier_star(x);
        let d1 = ROWS as f64;
        let d2 = ROWS as f64;
        let z1 = &self.x1 * &w;
        let r1 = &z1 * &c - &self.y1;
        // partial gradients of the mean upper loss at (W, c*)
        let gw = self.x1.transpose() * &r1 * c.transpose() / d1;
        let gc = z1.transpose() * &r1 / d1;
        // exact solve against the mean lower Hessian (ZᵀZ/D₂ + λI) ⊗ I
        let z2 = &self.x2 * &w;
        let gram = z2.transpose() * &z2 / d2
            + self.lambda * Matrix::identity(self.dims.embed, self.dims.embed);
        let v = gram.lu().solve(&gc).expect("positive definite ridge system");
        // mean cross block applied to v; the ∇_c residual vanishes at c*
        let r2 = &z2 * &c - &self.y2;
        let cross = self.x2.transpose() * (&r2 * v.transpose() + (&z2 * &v) * c.transpose()) / d2;
        Some(to_vec(&(gw - cross)))
    }

    fn name(&self) -> &str {
        "linear_hyperrep"
    }
}
