//! The five detectors: MMSE, exact MAP, loopy BP, and the two GNN variants.
//! All produce per-node posteriors over the alphabet plus hard decisions.

mod bp;
mod gnn;
mod map;
mod mmse;

pub use bp::{bp_detect, BpOptions};
pub use gnn::{
    egnn_edge_messages, gnn_forward, gnn_forward_batch, gnn_loss_and_grad, ArchConfig,
    EgnnParams, GraphBatch,
};
pub use map::{map_detect_bruteforce, residual_norm2, MAP_ENUMERATION_BUDGET};
pub use mmse::mmse_detect;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::nn::argmax_rows;

/// Execution metadata attached to every detector output.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorMeta {
    pub name: String,
    /// Message-passing or filtering iterations actually run (1 for one-shot
    /// detectors).
    pub iterations: usize,
    pub wall_s: f64,
    /// Final maximum absolute log-message change, for iterative detectors.
    pub final_delta: Option<f64>,
    /// Whether the iteration reached its convergence threshold.
    pub converged: Option<bool>,
}

/// Per-node posterior distributions and hard decisions.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorOutput {
    /// Shape 2Nt x K; every row is a distribution.
    pub posteriors: Array2<f64>,
    /// Length 2Nt, indices into the alphabet.
    pub hard_labels: Vec<u8>,
    pub meta: DetectorMeta,
}

/// Per-row argmax with ties to the lowest index.
pub fn hard_decision(posteriors: &Array2<f64>) -> Vec<u8> {
    argmax_rows(posteriors)
}

/// Fraction of mismatched positions.
pub fn ser(pred: &[u8], truth: &[u8]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::ShapeMismatch(format!(
            "prediction length {} vs truth length {}",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let errors = pred.iter().zip(truth).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / pred.len() as f64)
}

/// Half-width of the Wilson 95% confidence interval for an error rate of
/// `errors` out of `n` trials.
pub fn wilson_halfwidth(errors: usize, n: usize) -> f64 {
    assert!(n > 0, "confidence interval needs at least one trial");
    let z = 1.959963984540054_f64;
    let nf = n as f64;
    let p = errors as f64 / nf;
    let z2 = z * z;
    z / (1.0 + z2 / nf) * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt()
}
