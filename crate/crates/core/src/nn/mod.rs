//! Minimal neural-network toolkit: dense layers and MLPs, a GRU cell,
//! softmax/cross-entropy, a flat named parameter vector with checkpoint IO,
//! Adam, and a central finite-difference gradient oracle.
//!
//! All batched tensors are row-major `Array2<f64>` with one instance per
//! row. Backward passes are hand-staged adjoints of the forward code; the
//! finite-difference oracle in [`fd`] is the correctness reference.

mod adam;
mod dense;
mod fd;
mod gru;
mod loss;
mod params;

pub use adam::AdamState;
pub use dense::{glorot_init, Activation, Dense, Mlp};
pub use fd::{fd_gradient, rel_err};
pub use gru::{GruCache, GruCell};
pub use loss::{argmax_rows, cross_entropy, softmax_ce_grad, softmax_rows, LOG_CLAMP};
pub use params::{load_param_vector, save_param_vector, ParamVector, CHECKPOINT_MAGIC};
