//! bench: per-epoch train/test timing of naive, EGNN(ED=0), EGNN(ED=200).

use std::path::PathBuf;

use clap::Args as ClapArgs;
use egnn_core::graph::Variant;
use egnn_core::mimo::load_dataset;
use egnn_core::reports::{render_bench, write_bench};
use egnn_core::training::{benchmark_epoch_time, TrainConfig};
use egnn_core::Result;

#[derive(ClapArgs)]
pub struct Args {
    /// Directory holding train.ds and test.ds
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: Args) -> Result<()> {
    let train_ds = load_dataset(&args.data.join("train.ds"))?;
    let test_ds = load_dataset(&args.data.join("test.ds"))?;
    let configs = [
        TrainConfig::reference(Variant::Naive, 0, args.seed),
        TrainConfig::reference(Variant::Egnn, 0, args.seed),
        TrainConfig::reference(Variant::Egnn, 200, args.seed),
    ];
    let rows = benchmark_epoch_time(&configs, &train_ds, &test_ds)?;
    write_bench(&rows, args.seed, &args.out)?;
    print!("{}", render_bench(&rows, args.seed));
    println!("# csv -> {}", args.out.display());
    Ok(())
}
