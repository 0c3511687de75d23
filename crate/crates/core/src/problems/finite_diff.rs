//! Central finite differences — the independent oracle every analytic
//! gradient in this crate is checked against.

use crate::{Error, Result, Vector};

/// Central-difference gradient `(f(x + h e_j) − f(x − h e_j)) / (2h)`.
///
/// `h = 1e-6` balances truncation against rounding for unit-scale problems.
/// Errors if `f` returns a non-finite value at any probe point, naming the
/// offending coordinate.
pub fn finite_diff_grad<F>(f: F, x: &Vector, h: f64) -> Result<Vector>
where
    F: Fn(&Vector) -> f64,
{
    assert!(h > 0.0, "finite-difference step must be positive");
    let mut grad = Vector::zeros(x.len());
    let mut probe = x.clone();
    for j in 0..x.len() {
        probe[j] = x[j] + h;
        let plus = f(&probe);
        probe[j] = x[j] - h;
        let minus = f(&probe);
        probe[j] = x[j];
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite function value while differencing coordinate {j}"
            )));
        }
        grad[j] = (plus - minus) / (2.0 * h);
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_quadratic() {
        let x = Vector::from_vec(vec![1.5, -2.0, 0.25]);
        let g = finite_diff_grad(|v| 0.5 * v.norm_squared(), &x, 1e-6).unwrap();
        // Central differences are exact for quadratics up to rounding.
        assert!((&g - &x).norm() < 1e-9 * (1.0 + x.norm()));
    }

    #[test]
    fn zero_for_constant() {
        let x = Vector::from_vec(vec![3.0, -1.0]);
        let g = finite_diff_grad(|_| 4.2, &x, 1e-6).unwrap();
        assert_eq!(g, Vector::zeros(2));
    }

    #[test]
    fn non_finite_names_coordinate() {
        let x = Vector::from_vec(vec![0.0, 0.0]);
        let err = finite_diff_grad(|v| if v[1] > 0.0 { f64::NAN } else { 0.0 }, &x, 1e-6)
            .unwrap_err();
        assert!(err.to_string().contains("coordinate 1"), "{err}");
    }
}
