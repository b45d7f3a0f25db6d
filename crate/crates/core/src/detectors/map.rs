//! Exact MAP detection by exhaustive enumeration of the K^(2Nt) symbol
//! vectors. The hard output is the joint argmax of the posterior (the
//! minimum-distance vector); posteriors are exact per-node marginals
//! computed by full log-sum-exp summation.

use std::time::Instant;

use ndarray::Array2;

use crate::detectors::{DetectorMeta, DetectorOutput};
use crate::error::{Error, Result};
use crate::mimo::{Alphabet, ChannelSample};

/// Largest hypothesis count enumerated before refusing.
pub const MAP_ENUMERATION_BUDGET: u128 = 1 << 20;

/// Running log-sum-exp accumulator.
#[derive(Clone, Copy)]
struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    fn new() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    fn add(&mut self, lw: f64) {
        if lw <= self.max {
            self.sum += (lw - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - lw).exp() + 1.0;
            self.max = lw;
        }
    }

    fn value(&self) -> f64 {
        self.max + self.sum.ln()
    }
}

/// Exhaustive MAP detector. Refuses when K^(2Nt) exceeds
/// [`MAP_ENUMERATION_BUDGET`].
pub fn map_detect_bruteforce(
    sample: &ChannelSample,
    alphabet: &Alphabet,
) -> Result<DetectorOutput> {
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
    if !(sample.sigma2 > 0.0) {
        return Err(Error::Domain(format!(
            "sigma2 must be > 0, got {}",
            sample.sigma2
        )));
    }
    let n = h.ncols();
    let k = alphabet.k;
    let required = (k as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if required > MAP_ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudget {
            required,
            budget: MAP_ENUMERATION_BUDGET,
        });
    }

    // log p(x|y) = -(x'Gx - 2c'x)/(2 sigma2) + const, with G = H'H, c = H'y.
    // The enumeration runs a mixed-radix counter over labels and updates
    // x'Gx and c'x incrementally on each digit change (amortized O(n)).
    let gram = h.t().dot(h);
    let c = h.t().dot(&sample.y);
    let syms = &alphabet.symbols;

    let mut labels = vec![0usize; n];
    let mut x = vec![syms[0]; n];
    let mut gx: Vec<f64> = gram.dot(&ndarray::Array1::from_vec(x.clone())).to_vec();
    let mut quad: f64 = (0..n).map(|i| x[i] * gx[i]).sum();
    let mut lin: f64 = (0..n).map(|i| c[i] * x[i]).sum();

    let mut marginals = vec![LogSum::new(); n * k];
    let mut best_lw = f64::NEG_INFINITY;
    let mut best_labels = labels.clone();
    let inv_2s2 = 1.0 / (2.0 * sample.sigma2);

    let total = required as u64;
    for step in 0..total {
        let lw = -(quad - 2.0 * lin) * inv_2s2;
        for i in 0..n {
            marginals[i * k + labels[i]].add(lw);
        }
        if lw > best_lw {
            best_lw = lw;
            best_labels.copy_from_slice(&labels);
        }
        if step + 1 == total {
            break;
        }
        // Advance the counter; digit 0 is the fastest.
        let mut d = 0;
        loop {
            let old = x[d];
            let new_label = (labels[d] + 1) % k;
            let new = syms[new_label];
            let delta = new - old;
            quad += 2.0 * delta * gx[d] + delta * delta * gram[[d, d]];
            lin += delta * c[d];
            for i in 0..n {
                gx[i] += delta * gram[[i, d]];
            }
            labels[d] = new_label;
            x[d] = new;
            if new_label != 0 {
                break;
            }
            d += 1;
        }
    }

    let mut posteriors = Array2::zeros((n, k));
    for i in 0..n {
        let row_ls: Vec<f64> = (0..k).map(|a| marginals[i * k + a].value()).collect();
        let row_max = row_ls.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut norm = 0.0;
        for a in 0..k {
            let p = (row_ls[a] - row_max).exp();
            posteriors[[i, a]] = p;
            norm += p;
        }
        for a in 0..k {
            posteriors[[i, a]] /= norm;
        }
    }

    Ok(DetectorOutput {
        posteriors,
        hard_labels: best_labels.iter().map(|&l| l as u8).collect(),
        meta: DetectorMeta {
            name: "map".into(),
            iterations: 1,
            wall_s: start.elapsed().as_secs_f64(),
            final_delta: None,
            converged: None,
        },
    })
}

/// Residual ‖H x - y‖² of a label vector (detector comparison metric).
pub fn residual_norm2(sample: &ChannelSample, alphabet: &Alphabet, labels: &[u8]) -> f64 {
    let x = ndarray::Array1::from_iter(labels.iter().map(|&l| alphabet.symbols[l as usize]));
    let r = &sample.h.dot(&x) - &sample.y;
    r.dot(&r)
}
