//! Shared fixtures for the criterion benchmarks.

use adastep_core::problems::{bilevel_quadratic, build_quadratic_pair, BilevelQuadratic, QuadraticPair};

pub fn quadratic_fixture() -> QuadraticPair {
    build_quadratic_pair(7, 8).expect("construction succeeds")
}

pub fn bilevel_fixture() -> BilevelQuadratic {
    bilevel_quadratic(7, 6, 6, 0.1).expect("construction succeeds")
}
