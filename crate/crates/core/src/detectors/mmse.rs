//! Linear MMSE detector: x_hat = (H'H + (sigma2/Es) I)^-1 H'y followed by
//! nearest-symbol quantization. Es = 1/2 from the alphabet normalization.

use std::time::Instant;

use ndarray::{Array1, Array2};

use crate::detectors::{DetectorMeta, DetectorOutput};
use crate::error::{Error, Result};
use crate::mimo::{Alphabet, ChannelSample};

const SYMBOL_ENERGY: f64 = 0.5;

/// Cholesky factorization A = L L' of a symmetric positive-definite matrix.
fn cholesky(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    let mut l = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return Err(Error::Numeric(format!(
                        "regularized Gram matrix is not positive definite \
                         (pivot {s} at row {i})"
                    )));
                }
                l[[i, j]] = s.sqrt();
            } else {
                l[[i, j]] = s / l[[j, j]];
            }
        }
    }
    Ok(l)
}

/// Solves L L' x = b given the lower factor L.
fn cholesky_solve(l: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let n = l.nrows();
    let mut z = Array1::zeros(n);
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[[i, k]] * z[k];
        }
        z[i] = s / l[[i, i]];
    }
    let mut x = Array1::zeros(n);
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in (i + 1)..n {
            s -= l[[k, i]] * x[k];
        }
        x[i] = s / l[[i, i]];
    }
    x
}

/// MMSE filter plus quantization; posteriors are one-hot at the decision.
pub fn mmse_detect(sample: &ChannelSample, alphabet: &Alphabet) -> Result<DetectorOutput> {
    let start = Instant::now();
    let h = &sample.h;
    if h.nrows() != sample.y.len() {
        return Err(Error::ShapeMismatch(format!(
            "H is {}x{} but y has length {}",
            h.nrows(),
            h.ncols(),
            sample.y.len()
        )));
    }
    let n = h.ncols();
    let mut a = h.t().dot(h);
    let reg = sample.sigma2 / SYMBOL_ENERGY;
    for i in 0..n {
        a[[i, i]] += reg;
    }
    let l = cholesky(&a)?;
    let x_hat = cholesky_solve(&l, &h.t().dot(&sample.y));

    let mut posteriors = Array2::zeros((n, alphabet.k));
    let mut hard = Vec::with_capacity(n);
    for i in 0..n {
        let label = alphabet.nearest(x_hat[i]);
        posteriors[[i, label as usize]] = 1.0;
        hard.push(label);
    }
    Ok(DetectorOutput {
        posteriors,
        hard_labels: hard,
        meta: DetectorMeta {
            name: "mmse".into(),
            iterations: 1,
            wall_s: start.elapsed().as_secs_f64(),
            final_delta: None,
            converged: None,
        },
    })
}
