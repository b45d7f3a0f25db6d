//! GNN-based MIMO detection library.
//!
//! Implements the real-valued MIMO system model, the fully connected
//! detection graph with edge-drop sparsification, a from-scratch neural
//! toolkit (dense layers, GRU, Adam, reverse-mode gradients), five detectors
//! (MMSE, exact MAP, loopy BP, naive GNN, edge-weighted GNN), and the
//! training/evaluation/benchmark drivers behind the `egnn` CLI.
//!
//! Everything is deterministic given a 64-bit seed: each randomized stage
//! draws from its own ChaCha8 substream (see [`rng`]), so datasets, weight
//! initialization and training histories are bit-reproducible.

pub(crate) mod bytes;
pub mod detectors;
pub mod error;
pub mod graph;
pub mod mimo;
pub mod nn;
pub mod reports;
pub mod rng;
pub mod training;

pub use error::{Error, Result};
pub use graph::{build_graph, build_potentials, edge_drop, DetectionGraph, MrfPotentials, Variant};
pub use mimo::{Alphabet, ChannelSample, Dataset, MimoConfig, Scheme};
pub use nn::ParamVector;

pub use detectors::{DetectorOutput, EgnnParams};
pub use training::{TrainConfig, TrainReport};
