//! eval: SER of one detector over one dataset file.

use std::path::PathBuf;

use clap::Args as ClapArgs;
use egnn_core::detectors::EgnnParams;
use egnn_core::mimo::load_dataset;
use egnn_core::training::{evaluate, DetectorKind};
use egnn_core::{Error, Result};

use super::parse_detector;

#[derive(ClapArgs)]
pub struct Args {
    /// Dataset file to evaluate on
    #[arg(long)]
    data: PathBuf,
    /// Checkpoint to evaluate (exclusive with --detector)
    #[arg(long, conflicts_with = "detector")]
    ckpt: Option<PathBuf>,
    /// Closed-form detector: mmse, map, or bp
    #[arg(long)]
    detector: Option<String>,
}

pub fn run(args: Args) -> Result<()> {
    let dataset = load_dataset(&args.data)?;
    let loaded;
    let kind = if let Some(path) = &args.ckpt {
        loaded = EgnnParams::load(path)?;
        DetectorKind::Gnn(&loaded)
    } else if let Some(name) = &args.detector {
        parse_detector(name)?
    } else {
        return Err(Error::InvalidArgument(
            "pass exactly one of --ckpt or --detector".into(),
        ));
    };
    let result = evaluate(&dataset, &kind)?;
    println!("# seed = {} (dataset)", dataset.seed);
    println!("detector,ser,errors,n_symbols,wall_s");
    println!(
        "{},{},{},{},{}",
        kind.name(),
        result.ser,
        result.errors,
        result.n_symbols,
        result.wall_s
    );
    Ok(())
}
