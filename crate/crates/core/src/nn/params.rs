//! Flat named parameter vector and the checkpoint file format.
//!
//! Checkpoint layout (little-endian):
//!   magic "EGNN-CK\0" | version u32 | entry count u32
//!   | per entry: name length u16 | UTF-8 name | offset u64 | length u64
//!   | payload f64 x total
//! Entries tile the payload contiguously from offset 0. Floats round-trip
//! bit-exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::bytes::OffsetReader;
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"EGNN-CK\0";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Flat f64 storage with named contiguous slices.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    data: Vec<f64>,
    entries: Vec<(String, usize, usize)>, // name, offset, len
}

impl Default for ParamVector {
    fn default() -> Self {
        Self::new()
    }
}

impl ParamVector {
    pub fn new() -> Self {
        ParamVector {
            data: Vec::new(),
            entries: Vec::new(),
        }
    }

    /// Appends a named slice; names must be unique.
    pub fn push(&mut self, name: &str, values: &[f64]) -> Result<()> {
        if self.entries.iter().any(|(n, _, _)| n == name) {
            return Err(Error::InvalidArgument(format!(
                "duplicate parameter name '{name}'"
            )));
        }
        self.entries
            .push((name.to_string(), self.data.len(), values.len()));
        self.data.extend_from_slice(values);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.entries
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|&(_, off, len)| &self.data[off..off + len])
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut [f64]> {
        let found = self
            .entries
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|&(_, off, len)| (off, len));
        found.map(move |(off, len)| &mut self.data[off..off + len])
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _, _)| n.as_str())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, usize, usize)> {
        self.entries.iter().map(|&(ref n, o, l)| (n.as_str(), o, l))
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Writes a parameter vector in the checkpoint format.
pub fn save_param_vector(params: &ParamVector, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&(params.entries.len() as u32).to_le_bytes())?;
    for (name, off, len) in &params.entries {
        let bytes = name.as_bytes();
        if bytes.len() > u16::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "parameter name too long: {name}"
            )));
        }
        w.write_all(&(bytes.len() as u16).to_le_bytes())?;
        w.write_all(bytes)?;
        w.write_all(&(*off as u64).to_le_bytes())?;
        w.write_all(&(*len as u64).to_le_bytes())?;
    }
    for v in &params.data {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a checkpoint written by [`save_param_vector`].
pub fn load_param_vector(path: &Path) -> Result<ParamVector> {
    let mut r = OffsetReader::new(BufReader::new(File::open(path)?));

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic, "magic")?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Format {
            offset: 0,
            reason: format!("bad magic {magic:?}, expected \"EGNN-CK\\0\""),
        });
    }
    let version = r.read_u32("version")?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format {
            offset: 8,
            reason: format!("unsupported checkpoint version {version}"),
        });
    }
    let n_entries = r.read_u32("entry count")? as usize;
    let mut entries = Vec::with_capacity(n_entries);
    for _ in 0..n_entries {
        let name_off = r.offset;
        let name_len = r.read_u16("name length")? as usize;
        let mut name_bytes = vec![0u8; name_len];
        r.read_exact(&mut name_bytes, "name")?;
        let name = String::from_utf8(name_bytes).map_err(|_| Error::Format {
            offset: name_off + 2,
            reason: "parameter name is not valid UTF-8".into(),
        })?;
        let off = r.read_u64("slice offset")? as usize;
        let len = r.read_u64("slice length")? as usize;
        entries.push((name, off, len));
    }
    let registry_end = r.offset;

    // Entries must tile the payload contiguously from 0.
    let mut expect_off = 0usize;
    for (name, off, len) in &entries {
        if *off != expect_off {
            return Err(Error::Format {
                offset: registry_end,
                reason: format!(
                    "registry entry '{name}' starts at {off}, expected {expect_off} \
                     (entries must be contiguous)"
                ),
            });
        }
        expect_off += len;
    }
    let data = r.read_f64_vec(expect_off, "payload")?;
    r.expect_eof("the payload")?;

    let mut seen = std::collections::HashSet::new();
    for (name, _, _) in &entries {
        if !seen.insert(name.clone()) {
            return Err(Error::Format {
                offset: registry_end,
                reason: format!("duplicate parameter name '{name}'"),
            });
        }
    }

    Ok(ParamVector { data, entries })
}
