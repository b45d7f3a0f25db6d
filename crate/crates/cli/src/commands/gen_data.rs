//! gen-data: write train/val/test dataset files and print a manifest.

use std::path::PathBuf;

use clap::Args as ClapArgs;
use egnn_core::mimo::{generate_dataset, save_dataset, Scheme};
use egnn_core::{MimoConfig, Result};

use super::sha256_hex;

#[derive(ClapArgs)]
pub struct Args {
    /// Modulation: qpsk or qam16
    #[arg(long, default_value = "qpsk")]
    scheme: String,
    /// Transmit antennas (complex); nodes per graph = 2*Nt
    #[arg(long, default_value_t = 16)]
    nt: usize,
    /// Receive antennas (complex)
    #[arg(long, default_value_t = 32)]
    nr: usize,
    /// Lower end of the per-sample uniform SNR draw, dB
    /// (default 0 for qpsk, 4 for qam16)
    #[arg(long)]
    snr_min: Option<f64>,
    /// Upper end of the per-sample uniform SNR draw, dB
    /// (default 14 for qpsk, 18 for qam16)
    #[arg(long)]
    snr_max: Option<f64>,
    /// Training samples
    #[arg(long, default_value_t = 49152)]
    train: usize,
    /// Validation samples
    #[arg(long, default_value_t = 16384)]
    val: usize,
    /// Test samples
    #[arg(long, default_value_t = 16384)]
    test: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory for train.ds, val.ds, test.ds
    #[arg(long)]
    out: PathBuf,
    /// Draw channels with complex structure ([[Re,-Im],[Im,Re]] blocks)
    #[arg(long, default_value_t = false)]
    complex_structured: bool,
}

pub fn run(args: Args) -> Result<()> {
    let scheme = Scheme::parse(&args.scheme)?;
    let (default_min, default_max) = match scheme {
        Scheme::Qpsk => (0.0, 14.0),
        Scheme::Qam16 => (4.0, 18.0),
    };
    let config = MimoConfig {
        nt: args.nt,
        nr: args.nr,
        scheme,
        snr_db_range: (
            args.snr_min.unwrap_or(default_min),
            args.snr_max.unwrap_or(default_max),
        ),
        seed: args.seed,
        complex_structured: args.complex_structured,
    };
    let (train, val, test) = generate_dataset(&config, args.train, args.val, args.test)?;

    std::fs::create_dir_all(&args.out)?;
    println!("# seed = {}", args.seed);
    println!("path,count,sha256");
    for (name, ds) in [("train.ds", &train), ("val.ds", &val), ("test.ds", &test)] {
        let path = args.out.join(name);
        save_dataset(ds, &path)?;
        println!("{},{},{}", path.display(), ds.len(), sha256_hex(&path)?);
    }
    Ok(())
}
