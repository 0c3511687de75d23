//! Adaptive step-size optimization for single-level and bi-level problems.
//!
//! The crate is organized around four pieces:
//!
//! - [`problems`]: finite-sum and bi-level test problems with closed-form
//!   oracles (exact optima, exact lower solutions, exact hypergradients) plus
//!   the finite-difference checker used to validate every gradient.
//! - [`step_policies`]: single-level step-size rules — Polyak-ratio steps with
//!   a constant or decaying cap, backtracking Armijo line search, and the
//!   envelope clamp that sandwiches any candidate step between a decaying cap
//!   and a floor — together with the sampled-gradient descent driver.
//! - [`hypergrad`]: hypergradient estimation for bi-level problems via
//!   conjugate-gradient solves, a randomized truncated Neumann series, or the
//!   identity-Hessian shortcut.
//! - [`bilevel`]: the alternating bi-level optimizers — Polyak-style upper and
//!   lower steps, and line-search variants in SGD and Adam flavours with a
//!   configurable reset of the search ceiling.
//!
//! [`harness`] turns all of this into reproducible experiments: a flat
//! key/value config format, CSV traces, parameter sweeps, plot-data emission,
//! and a built-in invariant battery.
//!
//! All randomness flows through named counter-style streams (see [`rng`]), so
//! identical configs produce byte-identical outputs.

pub mod bilevel;
pub mod error;
pub mod harness;
pub mod hypergrad;
pub mod problems;
pub mod rng;
pub mod step_policies;

pub use error::Error;

/// Dense column vector used throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
