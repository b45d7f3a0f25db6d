//! inspect: human-readable summary of a dataset or checkpoint file.

use std::path::PathBuf;

use clap::Args as ClapArgs;
use egnn_core::detectors::EgnnParams;
use egnn_core::mimo::load_dataset;
use egnn_core::nn::load_param_vector;
use egnn_core::{Error, Result};

use super::sha256_hex;

#[derive(ClapArgs)]
pub struct Args {
    /// Dataset file to summarize (exclusive with --ckpt)
    #[arg(long, conflicts_with = "ckpt")]
    data: Option<PathBuf>,
    /// Checkpoint file to summarize
    #[arg(long)]
    ckpt: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    match (&args.data, &args.ckpt) {
        (Some(path), None) => {
            let ds = load_dataset(path)?;
            println!("dataset: {}", path.display());
            println!(
                "nt = {}, nr = {}, scheme = {}, samples = {}, seed = {}",
                ds.nt,
                ds.nr,
                ds.scheme.name(),
                ds.len(),
                ds.seed
            );
            println!("sha256 = {}", sha256_hex(path)?);
            Ok(())
        }
        (None, Some(path)) => {
            let v = load_param_vector(path)?;
            println!("checkpoint: {}", path.display());
            println!(
                "parameters = {} values in {} entries",
                v.len(),
                v.names().count()
            );
            for (name, _, len) in v.entries() {
                println!("  {name}  {len}");
            }
            if v.get("meta").is_some() {
                let params = EgnnParams::load(path)?;
                let a = params.arch;
                println!(
                    "meta: variant={} S={} D_h={} T={} K={} readout_hidden={} ed_count={}",
                    a.variant.name(),
                    a.s,
                    a.d_h,
                    a.t,
                    a.k,
                    a.readout_hidden,
                    a.ed_count
                );
            }
            println!("sha256 = {}", sha256_hex(path)?);
            Ok(())
        }
        _ => Err(Error::InvalidArgument(
            "pass exactly one of --data or --ckpt".into(),
        )),
    }
}
