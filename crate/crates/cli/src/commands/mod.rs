//! Subcommand implementations and shared flag parsing.

pub mod bench;
pub mod eval;
pub mod gen_data;
pub mod inspect;
pub mod sweep;
pub mod train;

use std::path::Path;

use egnn_core::training::DetectorKind;
use egnn_core::{Error, Result};
use sha2::{Digest, Sha256};

/// SNR flag syntax: "a,b,c" (comma list) or "start:stop:step" (inclusive
/// range), all in dB.
pub fn parse_snr_list(s: &str) -> Result<Vec<f64>> {
    let parse_db = |v: &str| -> Result<f64> {
        let f: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("cannot parse SNR value '{v}'")))?;
        if !f.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "SNR value must be finite, got {f}"
            )));
        }
        Ok(f)
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "range syntax is start:stop:step, got '{s}'"
            )));
        }
        let start = parse_db(parts[0])?;
        let stop = parse_db(parts[1])?;
        let step = parse_db(parts[2])?;
        if step <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "range step must be > 0, got {step}"
            )));
        }
        if stop < start {
            return Err(Error::InvalidArgument(format!(
                "range stop {stop} is below start {start}"
            )));
        }
        let mut points = Vec::new();
        let mut k = 0u32;
        loop {
            let v = start + f64::from(k) * step;
            if v > stop + 1e-9 {
                break;
            }
            points.push(v);
            k += 1;
        }
        Ok(points)
    } else {
        let points: Result<Vec<f64>> = s.split(',').map(parse_db).collect();
        let points = points?;
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty SNR list".into()));
        }
        Ok(points)
    }
}

/// Closed-form detector names accepted by --detector.
pub fn parse_detector(s: &str) -> Result<DetectorKind<'static>> {
    match s.to_ascii_lowercase().as_str() {
        "mmse" => Ok(DetectorKind::Mmse),
        "map" => Ok(DetectorKind::Map),
        "bp" => Ok(DetectorKind::Bp(Default::default())),
        other => Err(Error::InvalidArgument(format!(
            "unknown detector '{other}' (expected mmse, map, or bp)"
        ))),
    }
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    Ok(out)
}
