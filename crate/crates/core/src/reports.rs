//! Plot-ready CSV emission and lossless parsing for training reports, SNR
//! sweeps, and timing tables.
//!
//! Every file starts with '#' comment lines echoing the seed and the SNR
//! convention, then a fixed header row. Floats are printed with Rust's
//! shortest round-trip formatting, so parsing recovers them bit-exactly.

use std::path::Path;

use crate::error::{Error, Result};
use crate::training::{BenchRow, EpochRecord, SweepPoint, TrainReport};

/// The pinned SNR definition, echoed in every report header.
pub const SNR_CONVENTION: &str =
    "sigma2 = Nt / (Nr * 10^(snr_db/10)) per real dimension (total-power SNR)";

pub const TRAIN_HEADER: &str = "epoch,loss,val_ser,train_s,eval_s";
pub const SWEEP_HEADER: &str = "snr_db,detector,ser,ci95_halfwidth,n_symbols,errors";
pub const BENCH_HEADER: &str = "detector,train_s_per_epoch,test_s_per_epoch";

/// Renders a training report: seed and config echo as comments, one CSV row
/// per epoch, and any post-training test points as trailing comments.
pub fn render_train_report(report: &TrainReport) -> String {
    let c = &report.config;
    let mut out = String::new();
    out.push_str(&format!("# seed = {}\n", c.seed));
    out.push_str(&format!("# snr convention: {SNR_CONVENTION}\n"));
    out.push_str(&format!(
        "# config: variant={} ed_count={} epochs={} batch_size={} lr={} T={} S={} gru_hidden={}\n",
        c.variant.name(),
        c.ed_count,
        c.epochs,
        c.batch_size,
        c.lr,
        c.t,
        c.s,
        c.gru_hidden
    ));
    out.push_str(TRAIN_HEADER);
    out.push('\n');
    for r in &report.history {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.epoch, r.loss, r.val_ser, r.train_s, r.eval_s
        ));
    }
    for p in &report.test_points {
        out.push_str(&format!(
            "# test: snr_db={} detector={} ser={} ci95_halfwidth={} n_symbols={} errors={}\n",
            p.snr_db, p.detector, p.ser, p.ci95_halfwidth, p.n_symbols, p.errors
        ));
    }
    out
}

pub fn write_train_report(report: &TrainReport, path: &Path) -> Result<()> {
    std::fs::write(path, render_train_report(report))?;
    Ok(())
}

/// Renders an SNR sweep as CSV.
pub fn render_sweep(points: &[SweepPoint], seed: u64) -> String {
    let mut out = String::new();
    out.push_str(&format!("# seed = {seed}\n"));
    out.push_str(&format!("# snr convention: {SNR_CONVENTION}\n"));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.snr_db, p.detector, p.ser, p.ci95_halfwidth, p.n_symbols, p.errors
        ));
    }
    out
}

pub fn write_sweep(points: &[SweepPoint], seed: u64, path: &Path) -> Result<()> {
    std::fs::write(path, render_sweep(points, seed))?;
    Ok(())
}

/// Renders a timing table as CSV.
pub fn render_bench(rows: &[BenchRow], seed: u64) -> String {
    let mut out = String::new();
    out.push_str(&format!("# seed = {seed}\n"));
    out.push_str(&format!("# snr convention: {SNR_CONVENTION}\n"));
    out.push_str(BENCH_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            r.detector, r.train_s_per_epoch, r.test_s_per_epoch
        ));
    }
    out
}

pub fn write_bench(rows: &[BenchRow], seed: u64, path: &Path) -> Result<()> {
    std::fs::write(path, render_bench(rows, seed))?;
    Ok(())
}

/// Data lines of a report: comments skipped, header checked, fields split.
/// Yields (byte offset of the line, fields).
fn data_lines<'a>(text: &'a str, header: &str) -> Result<Vec<(u64, Vec<&'a str>)>> {
    let mut rows = Vec::new();
    let mut saw_header = false;
    let mut offset = 0u64;
    for line in text.lines() {
        let line_offset = offset;
        offset += line.len() as u64 + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !saw_header {
            if trimmed != header {
                return Err(Error::Format {
                    offset: line_offset,
                    reason: format!("expected header '{header}', found '{trimmed}'"),
                });
            }
            saw_header = true;
            continue;
        }
        rows.push((line_offset, trimmed.split(',').collect()));
    }
    if !saw_header {
        return Err(Error::Format {
            offset,
            reason: format!("missing header '{header}'"),
        });
    }
    Ok(rows)
}

fn parse_field<T: std::str::FromStr>(field: &str, offset: u64, what: &str) -> Result<T> {
    field.parse().map_err(|_| Error::Format {
        offset,
        reason: format!("cannot parse {what} from '{field}'"),
    })
}

fn expect_fields(fields: &[&str], n: usize, offset: u64) -> Result<()> {
    if fields.len() != n {
        return Err(Error::Format {
            offset,
            reason: format!("expected {n} fields, found {}", fields.len()),
        });
    }
    Ok(())
}

/// Parses the epoch rows back out of a rendered training report.
pub fn parse_train_history(text: &str) -> Result<Vec<EpochRecord>> {
    let mut out = Vec::new();
    for (off, fields) in data_lines(text, TRAIN_HEADER)? {
        expect_fields(&fields, 5, off)?;
        out.push(EpochRecord {
            epoch: parse_field(fields[0], off, "epoch")?,
            loss: parse_field(fields[1], off, "loss")?,
            val_ser: parse_field(fields[2], off, "val_ser")?,
            train_s: parse_field(fields[3], off, "train_s")?,
            eval_s: parse_field(fields[4], off, "eval_s")?,
        });
    }
    Ok(out)
}

/// Parses the rows back out of a rendered sweep.
pub fn parse_sweep(text: &str) -> Result<Vec<SweepPoint>> {
    let mut out = Vec::new();
    for (off, fields) in data_lines(text, SWEEP_HEADER)? {
        expect_fields(&fields, 6, off)?;
        out.push(SweepPoint {
            snr_db: parse_field(fields[0], off, "snr_db")?,
            detector: fields[1].to_string(),
            ser: parse_field(fields[2], off, "ser")?,
            ci95_halfwidth: parse_field(fields[3], off, "ci95_halfwidth")?,
            n_symbols: parse_field(fields[4], off, "n_symbols")?,
            errors: parse_field(fields[5], off, "errors")?,
        });
    }
    Ok(out)
}

/// Parses the rows back out of a rendered timing table.
pub fn parse_bench(text: &str) -> Result<Vec<BenchRow>> {
    let mut out = Vec::new();
    for (off, fields) in data_lines(text, BENCH_HEADER)? {
        expect_fields(&fields, 3, off)?;
        out.push(BenchRow {
            detector: fields[0].to_string(),
            train_s_per_epoch: parse_field(fields[1], off, "train_s_per_epoch")?,
            test_s_per_epoch: parse_field(fields[2], off, "test_s_per_epoch")?,
        });
    }
    Ok(out)
}
