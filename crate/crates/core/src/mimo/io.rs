//! Dataset file format.
//!
//! Little-endian layout:
//!   magic "EGNN-DS\0" | version u32 | Nt u32 | Nr u32 | scheme u32 | K u32
//!   | count u64 | seed u64
//! then per sample:
//!   sigma2 f64 | H row-major f64 x (2Nr*2Nt) | y f64 x 2Nr | labels u8 x 2Nt
//!
//! Floats round-trip bit-exactly. Parse failures report the byte offset of
//! the first inconsistency.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::bytes::OffsetReader;
use crate::error::{Error, Result};
use crate::mimo::{ChannelSample, Dataset, Scheme};

pub const DATASET_MAGIC: &[u8; 8] = b"EGNN-DS\0";
pub const DATASET_VERSION: u32 = 1;

/// Writes a dataset; see the module docs for the layout.
pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(DATASET_MAGIC)?;
    w.write_all(&DATASET_VERSION.to_le_bytes())?;
    w.write_all(&(dataset.nt as u32).to_le_bytes())?;
    w.write_all(&(dataset.nr as u32).to_le_bytes())?;
    w.write_all(&dataset.scheme.code().to_le_bytes())?;
    w.write_all(&(dataset.scheme.k() as u32).to_le_bytes())?;
    w.write_all(&(dataset.samples.len() as u64).to_le_bytes())?;
    w.write_all(&dataset.seed.to_le_bytes())?;
    for s in &dataset.samples {
        w.write_all(&s.sigma2.to_le_bytes())?;
        for v in s.h.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in s.y.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&s.labels)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dataset written by [`save_dataset`], validating the header and
/// every label against the alphabet size.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let mut r = OffsetReader::new(BufReader::new(File::open(path)?));

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic, "magic")?;
    if &magic != DATASET_MAGIC {
        return Err(Error::Format {
            offset: 0,
            reason: format!("bad magic {magic:?}, expected \"EGNN-DS\\0\""),
        });
    }
    let version = r.read_u32("version")?;
    if version != DATASET_VERSION {
        return Err(Error::Format {
            offset: 8,
            reason: format!("unsupported dataset version {version}"),
        });
    }
    let nt = r.read_u32("Nt")? as usize;
    if nt == 0 {
        return Err(Error::Format {
            offset: 12,
            reason: "Nt must be >= 1".into(),
        });
    }
    let nr = r.read_u32("Nr")? as usize;
    if nr < nt {
        return Err(Error::Format {
            offset: 16,
            reason: format!("Nr ({nr}) < Nt ({nt})"),
        });
    }
    let scheme_code = r.read_u32("scheme")?;
    let scheme = Scheme::from_code(scheme_code).ok_or_else(|| Error::Format {
        offset: 20,
        reason: format!("unknown scheme code {scheme_code}"),
    })?;
    let k = r.read_u32("K")? as usize;
    if k != scheme.k() {
        return Err(Error::Format {
            offset: 24,
            reason: format!("K={k} does not match scheme {} (K={})", scheme.name(), scheme.k()),
        });
    }
    let count = r.read_u64("sample count")? as usize;
    let seed = r.read_u64("seed")?;

    let mut samples = Vec::with_capacity(count);
    for s in 0..count {
        let sigma2_off = r.offset;
        let sigma2 = r.read_f64("sigma2")?;
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::Format {
                offset: sigma2_off,
                reason: format!("sample {s}: sigma2 = {sigma2} is not positive and finite"),
            });
        }
        let h_vals = r.read_f64_vec(4 * nr * nt, "H")?;
        let h = Array2::from_shape_vec((2 * nr, 2 * nt), h_vals).unwrap();
        let y = Array1::from_vec(r.read_f64_vec(2 * nr, "y")?);
        let labels_off = r.offset;
        let mut labels = vec![0u8; 2 * nt];
        r.read_exact(&mut labels, "labels")?;
        for (i, &l) in labels.iter().enumerate() {
            if (l as usize) >= k {
                return Err(Error::Format {
                    offset: labels_off + i as u64,
                    reason: format!("sample {s}: label {l} out of range [0, {k})"),
                });
            }
        }
        samples.push(ChannelSample {
            h,
            labels,
            y,
            sigma2,
        });
    }
    r.expect_eof("the last sample")?;

    Ok(Dataset {
        nt,
        nr,
        scheme,
        seed,
        samples,
    })
}
