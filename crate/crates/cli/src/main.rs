//! `egnn`: datasets, training, evaluation, SER sweeps, and timing
//! benchmarks for GNN-based MIMO detection.
//!
//! Exit codes: 0 success, 2 bad flags or arguments, 3 data/format errors,
//! 4 numeric aborts.

mod commands;

use clap::{Parser, Subcommand};
use egnn_core::Error;

#[derive(Parser)]
#[command(
    name = "egnn",
    version,
    about = "GNN-based MIMO detection: dataset generation, training, SER sweeps, benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate train/val/test dataset files
    GenData(commands::gen_data::Args),
    /// Train a GNN detector and write checkpoint + report CSV
    Train(commands::train::Args),
    /// Evaluate a checkpoint or closed-form detector on a dataset file
    Eval(commands::eval::Args),
    /// SER-vs-SNR sweep written as plot-ready CSV
    Sweep(commands::sweep::Args),
    /// Per-epoch train/test timing of the three GNN configurations
    Bench(commands::bench::Args),
    /// Summarize a dataset or checkpoint file
    Inspect(commands::inspect::Args),
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_)
        | Error::Config(_)
        | Error::Domain(_)
        | Error::EnumerationBudget { .. } => 2,
        Error::Io(_) | Error::Format { .. } | Error::EmptyDataset | Error::ShapeMismatch(_) => 3,
        Error::NonFiniteLoss { .. } | Error::Numeric(_) => 4,
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenData(args) => commands::gen_data::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Bench(args) => commands::bench::run(args),
        Command::Inspect(args) => commands::inspect::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
