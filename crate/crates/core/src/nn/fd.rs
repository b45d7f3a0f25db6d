//! Central finite-difference gradient oracle for testing analytic backward
//! passes.

use crate::error::{Error, Result};

/// Central differences (L(p + h e_k) - L(p - h e_k)) / 2h for every
/// coordinate. `loss` must be a pure function of the parameter slice.
pub fn fd_gradient<F>(mut loss: F, params: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> f64,
{
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be > 0, got {h}"
        )));
    }
    let mut work = params.to_vec();
    let mut grad = vec![0.0; params.len()];
    for k in 0..params.len() {
        let orig = work[k];
        work[k] = orig + h;
        let up = loss(&work);
        work[k] = orig - h;
        let down = loss(&work);
        work[k] = orig;
        grad[k] = (up - down) / (2.0 * h);
    }
    Ok(grad)
}

/// Relative error with an absolute floor, for comparing analytic and
/// finite-difference gradients: |a-b| / max(|a|, |b|, floor).
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_gradient_is_exact_to_oh2() {
        let params = [1.0, -2.0, 3.5];
        let loss = |p: &[f64]| 0.5 * p.iter().map(|v| v * v).sum::<f64>();
        let g = fd_gradient(loss, &params, 1e-5).unwrap();
        for (got, expect) in g.iter().zip(params.iter()) {
            assert!((got - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_step_is_rejected() {
        let loss = |_: &[f64]| 0.0;
        assert!(fd_gradient(loss, &[1.0], 0.0).is_err());
        assert!(fd_gradient(loss, &[1.0], -1e-5).is_err());
    }

    #[test]
    fn rel_err_uses_floor() {
        assert_eq!(rel_err(0.0, 0.0, 1e-6), 0.0);
        assert!((rel_err(1e-9, 2e-9, 1e-6) - 1e-3).abs() < 1e-12);
        assert!((rel_err(2.0, 1.0, 1e-6) - 0.5).abs() < 1e-12);
    }
}
