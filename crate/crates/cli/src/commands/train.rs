//! train: fit a GNN detector on a generated dataset directory.

use std::path::PathBuf;

use clap::Args as ClapArgs;
use egnn_core::graph::Variant;
use egnn_core::mimo::load_dataset;
use egnn_core::reports::{render_train_report, write_train_report, SNR_CONVENTION};
use egnn_core::training::{snr_sweep, train, DetectorKind, TrainConfig};
use egnn_core::{MimoConfig, Result};

use super::parse_snr_list;

#[derive(ClapArgs)]
pub struct Args {
    /// Directory holding train.ds and val.ds
    #[arg(long)]
    data: PathBuf,
    /// Message variant: naive or egnn
    #[arg(long, default_value = "egnn")]
    variant: String,
    /// Directed edges to drop per sample (even)
    #[arg(long, default_value_t = 0)]
    ed: usize,
    /// Message-passing steps T
    #[arg(long, default_value_t = 6)]
    steps: usize,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 64)]
    batch: usize,
    #[arg(long, default_value_t = 3e-4)]
    lr: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Where to write the best-validation checkpoint
    #[arg(long)]
    ckpt: PathBuf,
    /// Where to write the per-epoch report CSV
    #[arg(long)]
    report: PathBuf,
    /// Optional post-training test sweep points ("a,b,c" or "start:stop:step")
    #[arg(long)]
    snr_eval: Option<String>,
    /// Samples per post-training sweep point
    #[arg(long, default_value_t = 2000)]
    eval_samples: usize,
}

pub fn run(args: Args) -> Result<()> {
    let variant = Variant::parse(&args.variant)?;
    let train_ds = load_dataset(&args.data.join("train.ds"))?;
    let val_ds = load_dataset(&args.data.join("val.ds"))?;

    let mut config = TrainConfig::reference(variant, args.ed, args.seed);
    config.epochs = args.epochs;
    config.batch_size = args.batch;
    config.lr = args.lr;
    config.t = args.steps;
    if let Some(list) = &args.snr_eval {
        config.eval_snr_points = parse_snr_list(list)?;
    }

    println!("# seed = {}", args.seed);
    println!("# snr convention: {SNR_CONVENTION}");
    println!(
        "# training {} ed={} on {} samples ({} validation)",
        variant.name(),
        args.ed,
        train_ds.len(),
        val_ds.len()
    );

    let outcome = train(&train_ds, &val_ds, &config)?;
    let mut report = outcome.report;
    if !config.eval_snr_points.is_empty() {
        let base = MimoConfig {
            nt: train_ds.nt,
            nr: train_ds.nr,
            scheme: train_ds.scheme,
            snr_db_range: (0.0, 0.0),
            seed: args.seed,
            complex_structured: false,
        };
        report.test_points = snr_sweep(
            &DetectorKind::Gnn(&outcome.best),
            &base,
            &config.eval_snr_points,
            args.eval_samples,
        )?;
    }

    outcome.best.save(&args.ckpt)?;
    write_train_report(&report, &args.report)?;
    print!("{}", render_train_report(&report));
    if let Some(best) = report
        .history
        .iter()
        .map(|r| r.val_ser)
        .min_by(f64::total_cmp)
    {
        println!("# best val SER = {best}");
    }
    println!("# checkpoint -> {}", args.ckpt.display());
    println!("# report -> {}", args.report.display());
    Ok(())
}
