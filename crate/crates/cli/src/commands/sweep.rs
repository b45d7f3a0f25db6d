//! sweep: SER vs SNR curve for a checkpoint or closed-form detector.

use std::path::PathBuf;

use clap::Args as ClapArgs;
use egnn_core::detectors::EgnnParams;
use egnn_core::mimo::Scheme;
use egnn_core::reports::{render_sweep, write_sweep};
use egnn_core::training::{snr_sweep, DetectorKind};
use egnn_core::{Error, MimoConfig, Result};

use super::{parse_detector, parse_snr_list};

#[derive(ClapArgs)]
pub struct Args {
    /// Checkpoint to sweep (exclusive with --detector)
    #[arg(long, conflicts_with = "detector")]
    ckpt: Option<PathBuf>,
    /// Closed-form detector: mmse, map, or bp
    #[arg(long)]
    detector: Option<String>,
    #[arg(long, default_value = "qpsk")]
    scheme: String,
    #[arg(long, default_value_t = 16)]
    nt: usize,
    #[arg(long, default_value_t = 32)]
    nr: usize,
    /// SNR points in dB: "a,b,c" or "start:stop:step"
    #[arg(long)]
    snr: String,
    /// Channel uses per SNR point
    #[arg(long, default_value_t = 20000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Draw channels with complex structure ([[Re,-Im],[Im,Re]] blocks)
    #[arg(long, default_value_t = false)]
    complex_structured: bool,
}

pub fn run(args: Args) -> Result<()> {
    let points = parse_snr_list(&args.snr)?;
    let scheme = Scheme::parse(&args.scheme)?;
    let base = MimoConfig {
        nt: args.nt,
        nr: args.nr,
        scheme,
        snr_db_range: (0.0, 0.0),
        seed: args.seed,
        complex_structured: args.complex_structured,
    };

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

    let curve = snr_sweep(&kind, &base, &points, args.samples)?;
    write_sweep(&curve, args.seed, &args.out)?;
    print!("{}", render_sweep(&curve, args.seed));
    println!("# csv -> {}", args.out.display());
    Ok(())
}
