//! Training loop, dataset evaluation, SNR sweeps, and per-epoch timing.

use std::time::Instant;

use crate::detectors::{
    bp_detect, gnn_forward_batch, gnn_loss_and_grad, hard_decision, map_detect_bruteforce,
    mmse_detect, wilson_halfwidth, ArchConfig, BpOptions, EgnnParams, GraphBatch,
};
use crate::error::{Error, Result};
use crate::graph::{build_graph, build_potentials, edge_drop, Variant};
use crate::mimo::{generate_eval_set, shuffled_indices, Dataset, MimoConfig};
use crate::nn::AdamState;

/// Training hyperparameters. Architecture sizes live here; the readout
/// hidden width is the fixed reference value (see `ArchConfig::reference`).
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub variant: Variant,
    /// Directed edges dropped per sample (even, < 2Nt(2Nt-1)).
    pub ed_count: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// Message-passing steps T.
    pub t: usize,
    /// Node-state size S.
    pub s: usize,
    /// GRU hidden size D_h.
    pub gru_hidden: usize,
    pub seed: u64,
    /// SNR points (dB) a post-training sweep should cover; unused by the
    /// loop itself.
    pub eval_snr_points: Vec<f64>,
}

impl TrainConfig {
    /// Reference hyperparameters: 100 epochs, batch 64, lr 3e-4, T=6, S=32,
    /// GRU hidden 128.
    pub fn reference(variant: Variant, ed_count: usize, seed: u64) -> Self {
        TrainConfig {
            variant,
            ed_count,
            epochs: 100,
            batch_size: 64,
            lr: 3e-4,
            t: 6,
            s: 32,
            gru_hidden: 128,
            seed,
            eval_snr_points: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 1 {
            return Err(Error::InvalidArgument("batch_size must be >= 1".into()));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be > 0, got {}",
                self.lr
            )));
        }
        if self.t < 1 || self.s < 1 || self.gru_hidden < 1 {
            return Err(Error::InvalidArgument(
                "T, S, and gru_hidden must be >= 1".into(),
            ));
        }
        if self.ed_count % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "edge drop count must be even, got {}",
                self.ed_count
            )));
        }
        Ok(())
    }

    /// The architecture this config trains for alphabet size `k`.
    pub fn arch(&self, k: usize) -> ArchConfig {
        ArchConfig {
            variant: self.variant,
            s: self.s,
            d_h: self.gru_hidden,
            t: self.t,
            k,
            readout_hidden: ArchConfig::reference(self.variant, k, self.ed_count).readout_hidden,
            ed_count: self.ed_count,
        }
    }
}

/// One epoch of the training history.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    /// 1-based epoch number.
    pub epoch: usize,
    /// Mean cross-entropy over all training symbols of the epoch.
    pub loss: f64,
    pub val_ser: f64,
    pub train_s: f64,
    pub eval_s: f64,
}

/// Full training record: config echo, per-epoch history, and (optionally,
/// filled by a post-training sweep) the final test SER per SNR point.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub config: TrainConfig,
    pub history: Vec<EpochRecord>,
    pub test_points: Vec<SweepPoint>,
}

/// Trained parameters: the best-validation-SER checkpoint is the training
/// result; the last-epoch state is kept alongside.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub best: EgnnParams,
    pub final_params: EgnnParams,
    pub report: TrainReport,
}

fn check_compatible(train_ds: &Dataset, val_ds: &Dataset, config: &TrainConfig) -> Result<()> {
    if train_ds.nt != val_ds.nt || train_ds.nr != val_ds.nr || train_ds.scheme != val_ds.scheme {
        return Err(Error::Config(format!(
            "train split is {}x{} {} but validation split is {}x{} {}",
            train_ds.nt,
            train_ds.nr,
            train_ds.scheme.name(),
            val_ds.nt,
            val_ds.nr,
            val_ds.scheme.name()
        )));
    }
    let n = 2 * train_ds.nt;
    if config.ed_count >= n * (n - 1) && n > 1 {
        return Err(Error::Config(format!(
            "edge drop count {} must stay below the {} directed edges of a {n}-node graph",
            config.ed_count,
            n * (n - 1)
        )));
    }
    if config.ed_count > 0 && n * (n - 1) == 0 {
        return Err(Error::Config(
            "cannot drop edges from a single-node graph".into(),
        ));
    }
    Ok(())
}

/// Builds the flattened graph batch and label vector for dataset rows `idx`.
fn build_batch(
    ds: &Dataset,
    idx: &[usize],
    variant: Variant,
    ed_count: usize,
) -> Result<(GraphBatch, Vec<u8>)> {
    let mut graphs = Vec::with_capacity(idx.len());
    let mut labels = Vec::with_capacity(idx.len() * 2 * ds.nt);
    for &i in idx {
        let sample = &ds.samples[i];
        let g = build_graph(&sample.h, &sample.y, sample.sigma2, variant)?;
        let g = if ed_count > 0 {
            edge_drop(&g, ed_count)?
        } else {
            g
        };
        graphs.push(g);
        labels.extend_from_slice(&sample.labels);
    }
    Ok((GraphBatch::from_graphs(&graphs)?, labels))
}

/// Adam-trains a GNN detector. Each epoch reshuffles with a seeded
/// permutation, walks the shuffled set in `batch_size` chunks (last chunk
/// may be short), and evaluates validation SER. A non-finite loss aborts
/// with the 1-based epoch number.
pub fn train(train_ds: &Dataset, val_ds: &Dataset, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    if train_ds.is_empty() || val_ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_compatible(train_ds, val_ds, config)?;

    let arch = config.arch(train_ds.scheme.k());
    let mut params = EgnnParams::new(arch, config.seed)?;
    let mut theta = params.to_vector();
    let mut adam = AdamState::new(theta.len(), config.lr);

    let mut best = params.clone();
    let mut best_ser = f64::INFINITY;
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        let train_start = Instant::now();
        let order = shuffled_indices(train_ds.len(), config.seed, epoch as u64);
        let mut ce_sum = 0.0;
        let mut symbol_count = 0usize;
        for chunk in order.chunks(config.batch_size) {
            let (batch, labels) = build_batch(train_ds, chunk, arch.variant, arch.ed_count)?;
            let (loss, grads) = gnn_loss_and_grad(&batch, &params, &labels)?;
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch });
            }
            let gvec = grads.to_vector();
            adam.step(theta.data_mut(), gvec.data())?;
            params.set_from_vector(&theta)?;
            ce_sum += loss * labels.len() as f64;
            symbol_count += labels.len();
        }
        let train_s = train_start.elapsed().as_secs_f64();

        let eval = evaluate(val_ds, &DetectorKind::Gnn(&params))?;
        if eval.ser < best_ser {
            best_ser = eval.ser;
            best = params.clone();
        }
        history.push(EpochRecord {
            epoch,
            loss: ce_sum / symbol_count as f64,
            val_ser: eval.ser,
            train_s,
            eval_s: eval.wall_s,
        });
    }

    Ok(TrainOutcome {
        best,
        final_params: params,
        report: TrainReport {
            config: config.clone(),
            history,
            test_points: Vec::new(),
        },
    })
}

/// Detector selection for evaluation and sweeps.
pub enum DetectorKind<'a> {
    Mmse,
    Map,
    Bp(BpOptions),
    /// GNN with the edge drop count it was trained with (`arch.ed_count`).
    Gnn(&'a EgnnParams),
}

impl DetectorKind<'_> {
    pub fn name(&self) -> String {
        match self {
            DetectorKind::Mmse => "mmse".into(),
            DetectorKind::Map => "map".into(),
            DetectorKind::Bp(_) => "bp".into(),
            DetectorKind::Gnn(p) => format!("{}-ed{}", p.arch.variant.name(), p.arch.ed_count),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult {
    pub ser: f64,
    pub errors: usize,
    pub n_symbols: usize,
    pub wall_s: f64,
}

/// Samples per forward chunk during GNN evaluation.
const EVAL_BATCH: usize = 256;

/// Hard-decision SER of `detector` over every symbol of `dataset`.
pub fn evaluate(dataset: &Dataset, detector: &DetectorKind) -> Result<EvalResult> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let alphabet = dataset.alphabet();
    let start = Instant::now();
    let mut errors = 0usize;
    let mut n_symbols = 0usize;
    match detector {
        DetectorKind::Gnn(params) => {
            let idx: Vec<usize> = (0..dataset.len()).collect();
            for chunk in idx.chunks(EVAL_BATCH) {
                let (batch, labels) =
                    build_batch(dataset, chunk, params.arch.variant, params.arch.ed_count)?;
                let probs = gnn_forward_batch(&batch, params)?;
                let hard = hard_decision(&probs);
                errors += hard.iter().zip(&labels).filter(|(a, b)| a != b).count();
                n_symbols += labels.len();
            }
        }
        DetectorKind::Mmse => {
            for sample in &dataset.samples {
                let out = mmse_detect(sample, &alphabet)?;
                errors += out
                    .hard_labels
                    .iter()
                    .zip(&sample.labels)
                    .filter(|(a, b)| a != b)
                    .count();
                n_symbols += sample.labels.len();
            }
        }
        DetectorKind::Map => {
            for sample in &dataset.samples {
                let out = map_detect_bruteforce(sample, &alphabet)?;
                errors += out
                    .hard_labels
                    .iter()
                    .zip(&sample.labels)
                    .filter(|(a, b)| a != b)
                    .count();
                n_symbols += sample.labels.len();
            }
        }
        DetectorKind::Bp(opts) => {
            for sample in &dataset.samples {
                let graph = build_graph(&sample.h, &sample.y, sample.sigma2, Variant::Egnn)?;
                let pots = build_potentials(&sample.h, &sample.y, sample.sigma2, &alphabet)?;
                let out = bp_detect(&pots, &graph, *opts)?;
                errors += out
                    .hard_labels
                    .iter()
                    .zip(&sample.labels)
                    .filter(|(a, b)| a != b)
                    .count();
                n_symbols += sample.labels.len();
            }
        }
    }
    Ok(EvalResult {
        ser: errors as f64 / n_symbols as f64,
        errors,
        n_symbols,
        wall_s: start.elapsed().as_secs_f64(),
    })
}

/// One SER measurement at a fixed SNR.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub detector: String,
    pub ser: f64,
    pub ci95_halfwidth: f64,
    pub n_symbols: usize,
    pub errors: usize,
}

/// SER vs SNR: for each point, generates a fresh fixed-SNR test set of
/// `n_samples` channel uses from `base` (same base seed at every point, so
/// different detectors see identical data) and reports SER with a Wilson
/// 95% half-width.
pub fn snr_sweep(
    detector: &DetectorKind,
    base: &MimoConfig,
    snr_points: &[f64],
    n_samples: usize,
) -> Result<Vec<SweepPoint>> {
    if snr_points.is_empty() {
        return Err(Error::InvalidArgument(
            "SNR sweep needs at least one point".into(),
        ));
    }
    if n_samples == 0 {
        return Err(Error::InvalidArgument(
            "SNR sweep needs at least one sample per point".into(),
        ));
    }
    let mut curve = Vec::with_capacity(snr_points.len());
    for (i, &snr_db) in snr_points.iter().enumerate() {
        let mut config = base.clone();
        config.snr_db_range = (snr_db, snr_db);
        let ds = generate_eval_set(&config, n_samples, i as u64)?;
        let eval = evaluate(&ds, detector)?;
        curve.push(SweepPoint {
            snr_db,
            detector: detector.name(),
            ser: eval.ser,
            ci95_halfwidth: wilson_halfwidth(eval.errors, eval.n_symbols),
            n_symbols: eval.n_symbols,
            errors: eval.errors,
        });
    }
    Ok(curve)
}

/// One row of the timing table.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub detector: String,
    pub train_s_per_epoch: f64,
    pub test_s_per_epoch: f64,
}

/// Wall-clock cost per training epoch and per test pass for each config,
/// on shared datasets: one warm-up epoch, then the median of 5 timed
/// epochs (parameters keep evolving across the timed epochs; cost depends
/// only on shapes).
pub fn benchmark_epoch_time(
    configs: &[TrainConfig],
    train_ds: &Dataset,
    test_ds: &Dataset,
) -> Result<Vec<BenchRow>> {
    if train_ds.is_empty() || test_ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rows = Vec::with_capacity(configs.len());
    for config in configs {
        config.validate()?;
        check_compatible(train_ds, test_ds, config)?;
        let arch = config.arch(train_ds.scheme.k());
        let mut params = EgnnParams::new(arch, config.seed)?;
        let mut theta = params.to_vector();
        let mut adam = AdamState::new(theta.len(), config.lr);

        let mut epoch_of = |epoch: u64, params: &mut EgnnParams| -> Result<f64> {
            let start = Instant::now();
            let order = shuffled_indices(train_ds.len(), config.seed, epoch);
            for chunk in order.chunks(config.batch_size) {
                let (batch, labels) = build_batch(train_ds, chunk, arch.variant, arch.ed_count)?;
                let (loss, grads) = gnn_loss_and_grad(&batch, params, &labels)?;
                if !loss.is_finite() {
                    return Err(Error::NonFiniteLoss {
                        epoch: epoch as usize,
                    });
                }
                adam.step(theta.data_mut(), grads.to_vector().data())?;
                params.set_from_vector(&theta)?;
            }
            Ok(start.elapsed().as_secs_f64())
        };
        epoch_of(1, &mut params)?; // warm-up
        let mut train_times = [0.0; 5];
        for (i, t) in train_times.iter_mut().enumerate() {
            *t = epoch_of(2 + i as u64, &mut params)?;
        }

        let test_pass = |params: &EgnnParams| -> Result<f64> {
            let start = Instant::now();
            let idx: Vec<usize> = (0..test_ds.len()).collect();
            for chunk in idx.chunks(config.batch_size) {
                let (batch, _) = build_batch(test_ds, chunk, arch.variant, arch.ed_count)?;
                gnn_forward_batch(&batch, params)?;
            }
            Ok(start.elapsed().as_secs_f64())
        };
        test_pass(&params)?; // warm-up
        let mut test_times = [0.0; 5];
        for t in test_times.iter_mut() {
            *t = test_pass(&params)?;
        }

        rows.push(BenchRow {
            detector: format!("{}-ed{}", arch.variant.name(), arch.ed_count),
            train_s_per_epoch: median5(train_times),
            test_s_per_epoch: median5(test_times),
        });
    }
    Ok(rows)
}

fn median5(mut v: [f64; 5]) -> f64 {
    v.sort_by(f64::total_cmp);
    v[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mimo::{build_alphabet, generate_dataset, ChannelSample, Scheme};
    use ndarray::{arr1, arr2};

    fn toy_config(variant: Variant, epochs: usize) -> TrainConfig {
        TrainConfig {
            variant,
            ed_count: 0,
            epochs,
            batch_size: 32,
            lr: 3e-3,
            t: 2,
            s: 8,
            gru_hidden: 16,
            seed: 7,
            eval_snr_points: Vec::new(),
        }
    }

    fn toy_data(n_train: usize, n_val: usize) -> (Dataset, Dataset) {
        let config = MimoConfig {
            nt: 2,
            nr: 4,
            scheme: Scheme::Qpsk,
            snr_db_range: (6.0, 12.0),
            seed: 99,
            complex_structured: false,
        };
        let (train, val, _) = generate_dataset(&config, n_train, n_val, 1).unwrap();
        (train, val)
    }

    #[test]
    fn zero_epochs_returns_initial_params() {
        let (train_ds, val_ds) = toy_data(8, 4);
        let config = toy_config(Variant::Egnn, 0);
        let out = train(&train_ds, &val_ds, &config).unwrap();
        assert!(out.report.history.is_empty());
        let init = EgnnParams::new(config.arch(2), config.seed).unwrap();
        assert_eq!(out.best, init);
        assert_eq!(out.final_params, init);
    }

    #[test]
    fn training_beats_the_untrained_model() {
        let (train_ds, val_ds) = toy_data(512, 256);
        let config = toy_config(Variant::Egnn, 8);
        let init = EgnnParams::new(config.arch(2), config.seed).unwrap();
        let before = evaluate(&val_ds, &DetectorKind::Gnn(&init)).unwrap();
        let out = train(&train_ds, &val_ds, &config).unwrap();
        let after = out.report.history.last().unwrap().val_ser;
        assert!(
            after < before.ser,
            "val SER after {after} vs untrained {}",
            before.ser
        );
        assert_eq!(out.report.history.len(), 8);
        for (i, rec) in out.report.history.iter().enumerate() {
            assert_eq!(rec.epoch, i + 1);
            assert!((0.0..=1.0).contains(&rec.val_ser));
            assert!(rec.loss.is_finite());
        }
        // Best checkpoint is the minimum of the recorded curve.
        let min_ser = out
            .report
            .history
            .iter()
            .map(|r| r.val_ser)
            .fold(f64::INFINITY, f64::min);
        let best_eval = evaluate(&val_ds, &DetectorKind::Gnn(&out.best)).unwrap();
        assert_eq!(best_eval.ser, min_ser);
    }

    #[test]
    fn same_seed_trains_bit_identically() {
        let (train_ds, val_ds) = toy_data(64, 32);
        let config = toy_config(Variant::Naive, 2);
        let a = train(&train_ds, &val_ds, &config).unwrap();
        let b = train(&train_ds, &val_ds, &config).unwrap();
        assert_eq!(a.final_params, b.final_params);
        for (ra, rb) in a.report.history.iter().zip(&b.report.history) {
            assert_eq!(ra.loss.to_bits(), rb.loss.to_bits());
            assert_eq!(ra.val_ser, rb.val_ser);
        }
    }

    #[test]
    fn train_validates_inputs() {
        let (train_ds, val_ds) = toy_data(8, 4);
        let empty = Dataset {
            nt: 2,
            nr: 4,
            scheme: Scheme::Qpsk,
            seed: 0,
            samples: Vec::new(),
        };
        let config = toy_config(Variant::Egnn, 1);
        assert!(matches!(
            train(&empty, &val_ds, &config),
            Err(Error::EmptyDataset)
        ));

        let mut mismatched = toy_config(Variant::Egnn, 1);
        mismatched.ed_count = 12; // 4-node graph has only 12 directed edges
        assert!(matches!(
            train(&train_ds, &val_ds, &mismatched),
            Err(Error::Config(_))
        ));

        let mut odd = toy_config(Variant::Egnn, 1);
        odd.ed_count = 3;
        assert!(matches!(
            train(&train_ds, &val_ds, &odd),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn evaluate_refuses_empty_and_matches_map_self_consistency() {
        let empty = Dataset {
            nt: 1,
            nr: 1,
            scheme: Scheme::Qpsk,
            seed: 0,
            samples: Vec::new(),
        };
        assert!(matches!(
            evaluate(&empty, &DetectorKind::Mmse),
            Err(Error::EmptyDataset)
        ));

        let (ds, _) = toy_data(16, 1);
        let alphabet = ds.alphabet();
        let eval = evaluate(&ds, &DetectorKind::Map).unwrap();
        let mut errors = 0;
        for sample in &ds.samples {
            let out = map_detect_bruteforce(sample, &alphabet).unwrap();
            errors += out
                .hard_labels
                .iter()
                .zip(&sample.labels)
                .filter(|(a, b)| a != b)
                .count();
        }
        assert_eq!(eval.errors, errors);
        assert_eq!(eval.n_symbols, 16 * 4);
    }

    #[test]
    fn mmse_is_perfect_on_orthonormal_noiseless_channel() {
        let alphabet = build_alphabet(Scheme::Qpsk);
        let a = alphabet.symbols[1];
        // H = I (Nt=Nr=1 real model), x = (+a, -a), sigma2 tiny.
        let sample = ChannelSample {
            h: arr2(&[[1.0, 0.0], [0.0, 1.0]]),
            labels: vec![1, 0],
            y: arr1(&[a, -a]),
            sigma2: 1e-12,
        };
        let ds = Dataset {
            nt: 1,
            nr: 1,
            scheme: Scheme::Qpsk,
            seed: 0,
            samples: vec![sample],
        };
        let eval = evaluate(&ds, &DetectorKind::Mmse).unwrap();
        assert_eq!(eval.errors, 0);
        assert_eq!(eval.ser, 0.0);
    }

    #[test]
    fn sweep_has_one_row_per_point_and_is_deterministic() {
        let base = MimoConfig {
            nt: 2,
            nr: 4,
            scheme: Scheme::Qpsk,
            snr_db_range: (0.0, 0.0),
            seed: 3,
            complex_structured: false,
        };
        let single = snr_sweep(&DetectorKind::Mmse, &base, &[10.0], 200).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].detector, "mmse");
        assert_eq!(single[0].n_symbols, 200 * 4);

        let a = snr_sweep(&DetectorKind::Mmse, &base, &[4.0, 12.0], 300).unwrap();
        let b = snr_sweep(&DetectorKind::Mmse, &base, &[4.0, 12.0], 300).unwrap();
        assert_eq!(a, b);
        assert!(a[0].ser >= a[1].ser, "SER should not rise with SNR here");
        for p in &a {
            assert!(p.ci95_halfwidth > 0.0);
            assert_eq!(p.errors as f64 / p.n_symbols as f64, p.ser);
        }

        assert!(snr_sweep(&DetectorKind::Mmse, &base, &[], 10).is_err());
    }

    #[test]
    fn benchmark_emits_one_row_per_config() {
        let (train_ds, test_ds) = toy_data(24, 24);
        let mut naive = toy_config(Variant::Naive, 1);
        naive.batch_size = 8;
        let mut egnn0 = toy_config(Variant::Egnn, 1);
        egnn0.batch_size = 8;
        let mut egnn_drop = toy_config(Variant::Egnn, 1);
        egnn_drop.batch_size = 8;
        egnn_drop.ed_count = 4;
        let rows =
            benchmark_epoch_time(&[naive, egnn0, egnn_drop], &train_ds, &test_ds).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].detector, "naive-ed0");
        assert_eq!(rows[1].detector, "egnn-ed0");
        assert_eq!(rows[2].detector, "egnn-ed4");
        for row in &rows {
            assert!(row.train_s_per_epoch > 0.0);
            assert!(row.test_s_per_epoch > 0.0);
        }
    }
}
