//! Shared fixtures for the criterion benches: small deterministic datasets,
//! graph batches, and initialized models.

use egnn_core::detectors::{ArchConfig, EgnnParams, GraphBatch};
use egnn_core::graph::{build_graph, edge_drop, DetectionGraph, Variant};
use egnn_core::mimo::{generate_eval_set, Dataset, MimoConfig, Scheme};

/// Fixed-SNR QPSK dataset at 10 dB.
pub fn bench_dataset(nt: usize, nr: usize, count: usize) -> Dataset {
    let config = MimoConfig {
        nt,
        nr,
        scheme: Scheme::Qpsk,
        snr_db_range: (10.0, 10.0),
        seed: 1234,
        complex_structured: false,
    };
    generate_eval_set(&config, count, 0).unwrap()
}

/// Detection graphs for every sample, optionally sparsified.
pub fn graphs_of(ds: &Dataset, variant: Variant, ed_count: usize) -> Vec<DetectionGraph> {
    ds.samples
        .iter()
        .map(|s| {
            let g = build_graph(&s.h, &s.y, s.sigma2, variant).unwrap();
            if ed_count > 0 {
                edge_drop(&g, ed_count).unwrap()
            } else {
                g
            }
        })
        .collect()
}

/// Flattened batch plus the matching label vector.
pub fn batch_of(ds: &Dataset, variant: Variant, ed_count: usize) -> (GraphBatch, Vec<u8>) {
    let graphs = graphs_of(ds, variant, ed_count);
    let labels = ds
        .samples
        .iter()
        .flat_map(|s| s.labels.iter().copied())
        .collect();
    (GraphBatch::from_graphs(&graphs).unwrap(), labels)
}

/// Reference-size model (S=32, D_h=128, T=6) for QPSK.
pub fn reference_params(variant: Variant, ed_count: usize) -> EgnnParams {
    EgnnParams::new(ArchConfig::reference(variant, 2, ed_count), 7).unwrap()
}
