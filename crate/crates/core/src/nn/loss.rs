//! Softmax and cross-entropy with the combined softmax+CE gradient.

use ndarray::{Array2, Axis};

/// Log arguments are clamped here so confidently wrong predictions stay
/// finite.
pub const LOG_CLAMP: f64 = 1e-30;

/// Row-wise softmax with max-subtraction for overflow safety.
pub fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    out
}

/// Mean cross-entropy of one-hot targets: -log p[label], averaged over all
/// rows (nodes of all batch elements).
pub fn cross_entropy(probs: &Array2<f64>, labels: &[u8]) -> f64 {
    assert_eq!(
        probs.nrows(),
        labels.len(),
        "probability rows and labels must align"
    );
    let mut acc = 0.0;
    for (row, &l) in probs.rows().into_iter().zip(labels) {
        acc -= row[l as usize].max(LOG_CLAMP).ln();
    }
    acc / labels.len() as f64
}

/// Gradient of mean cross-entropy with respect to the LOGITS feeding
/// `softmax_rows`: (softmax - onehot) / n_rows.
pub fn softmax_ce_grad(probs: &Array2<f64>, labels: &[u8]) -> Array2<f64> {
    assert_eq!(probs.nrows(), labels.len());
    let n = probs.nrows() as f64;
    let mut g = probs / n;
    for (i, &l) in labels.iter().enumerate() {
        g[[i, l as usize]] -= 1.0 / n;
    }
    g
}

/// Row-wise argmax with ties going to the lowest index.
pub fn argmax_rows(probs: &Array2<f64>) -> Vec<u8> {
    probs
        .axis_iter(Axis(0))
        .map(|row| {
            let mut best = 0usize;
            let mut best_v = row[0];
            for (i, &v) in row.iter().enumerate().skip(1) {
                if v > best_v {
                    best_v = v;
                    best = i;
                }
            }
            best as u8
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn softmax_of_equal_logits_is_uniform() {
        let p = softmax_rows(&arr2(&[[0.0, 0.0]]));
        assert!((p[[0, 0]] - 0.5).abs() < 1e-15);
        let p3 = softmax_rows(&arr2(&[[7.5, 7.5, 7.5]]));
        for v in p3.iter() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn softmax_is_shift_invariant_and_normalized() {
        let a = softmax_rows(&arr2(&[[1.0, 2.0, -0.5]]));
        let b = softmax_rows(&arr2(&[[101.0, 102.0, 99.5]]));
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
        let s: f64 = a.row(0).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn softmax_survives_huge_logits() {
        let p = softmax_rows(&arr2(&[[1000.0, 0.0]]));
        assert!(p.iter().all(|v| v.is_finite()));
        assert!((p[[0, 0]] - 1.0).abs() < 1e-12);
        assert!(p[[0, 1]] >= 0.0);
    }

    #[test]
    fn cross_entropy_examples() {
        let perfect = arr2(&[[1.0, 0.0], [0.0, 1.0]]);
        assert!(cross_entropy(&perfect, &[0, 1]) < 1e-12);

        let uniform = arr2(&[[0.5, 0.5], [0.5, 0.5]]);
        assert!((cross_entropy(&uniform, &[0, 1]) - 2f64.ln()).abs() < 1e-12);

        let p = arr2(&[[0.9, 0.1]]);
        assert!((cross_entropy(&p, &[0]) + 0.9f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn cross_entropy_is_finite_at_zero_probability() {
        let p = arr2(&[[0.0, 1.0]]);
        let l = cross_entropy(&p, &[0]);
        assert!(l.is_finite());
        assert!(l > 60.0); // -ln(1e-30) ~ 69
    }

    #[test]
    fn softmax_ce_grad_is_softmax_minus_onehot() {
        let logits = arr2(&[[0.2, -0.4, 1.0], [0.0, 0.0, 0.0]]);
        let probs = softmax_rows(&logits);
        let g = softmax_ce_grad(&probs, &[2, 0]);
        for i in 0..2 {
            for j in 0..3 {
                let onehot = if (i == 0 && j == 2) || (i == 1 && j == 0) {
                    1.0
                } else {
                    0.0
                };
                assert!((g[[i, j]] - (probs[[i, j]] - onehot) / 2.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn argmax_ties_go_low() {
        let p = arr2(&[[0.5, 0.5], [0.2, 0.8]]);
        assert_eq!(argmax_rows(&p), vec![0, 1]);
        let p2 = arr2(&[[0.2, 0.3, 0.3, 0.2]]);
        assert_eq!(argmax_rows(&p2), vec![1]);
    }
}
