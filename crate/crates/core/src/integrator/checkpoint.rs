//! Binary checkpoints: `"TNSCHK1"`, then little-endian `u32 N`, `f64 ν`,
//! `f64 t`, then `(re, im)` f64 pairs for the three components of every
//! wavevector in storage-index order.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::spectral::{Mode, SpectralField, WaveGrid};
use crate::Real;

pub const MAGIC: &[u8; 7] = b"TNSCHK1";

/// A field snapshot tied to a trajectory sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint<T: Real> {
    pub sample: usize,
    pub t: f64,
    pub nu: f64,
    pub field: SpectralField<T>,
}

pub fn encode<T: Real>(field: &SpectralField<T>, nu: f64, t: f64) -> Vec<u8> {
    let n = field.grid().n();
    let mut out = Vec::with_capacity(MAGIC.len() + 4 + 16 + field.coeffs().len() * 48);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&nu.to_le_bytes());
    out.extend_from_slice(&t.to_le_bytes());
    for v in field.coeffs() {
        for c in v {
            out.extend_from_slice(&c.re.f64().to_le_bytes());
            out.extend_from_slice(&c.im.f64().to_le_bytes());
        }
    }
    out
}

/// Returns `(ν, t, field)`.
pub fn decode<T: Real>(bytes: &[u8], path: &Path) -> Result<(f64, f64, SpectralField<T>)> {
    let bad = |reason: String| Error::Checkpoint {
        path: path.to_path_buf(),
        reason,
    };
    let header = MAGIC.len() + 4 + 16;
    if bytes.len() < header || &bytes[..MAGIC.len()] != MAGIC {
        return Err(bad("missing TNSCHK1 header".into()));
    }
    let mut pos = MAGIC.len();
    let mut take = |len: usize| {
        let s = &bytes[pos..pos + len];
        pos += len;
        s
    };
    let n = u32::from_le_bytes(take(4).try_into().expect("4 bytes")) as usize;
    let nu = f64::from_le_bytes(take(8).try_into().expect("8 bytes"));
    let t = f64::from_le_bytes(take(8).try_into().expect("8 bytes"));
    let grid = WaveGrid::new(n).map_err(|e| bad(e.to_string()))?;
    let expected = header + grid.len() * 48;
    if bytes.len() != expected {
        return Err(bad(format!("expected {expected} bytes for N = {n}, found {}", bytes.len())));
    }
    let body = &bytes[header..];
    let read = |i: usize| f64::from_le_bytes(body[8 * i..8 * i + 8].try_into().expect("8 bytes"));
    let coeffs: Vec<Mode<T>> = (0..grid.len())
        .map(|idx| {
            let base = idx * 6;
            let c = |j: usize| Complex::new(T::of(read(base + 2 * j)), T::of(read(base + 2 * j + 1)));
            [c(0), c(1), c(2)]
        })
        .collect();
    let field = SpectralField::from_coeffs(grid, coeffs).map_err(|e| bad(e.to_string()))?;
    Ok((nu, t, field))
}

/// File name of the checkpoint for trajectory sample `sample`.
pub fn file_name(sample: usize) -> String {
    format!("chk_{sample:06}.bin")
}

pub fn write<T: Real>(dir: &Path, ck: &Checkpoint<T>) -> Result<PathBuf> {
    let path = dir.join(file_name(ck.sample));
    std::fs::write(&path, encode(&ck.field, ck.nu, ck.t))?;
    Ok(path)
}

pub fn read<T: Real>(path: &Path, sample: usize) -> Result<Checkpoint<T>> {
    let bytes = std::fs::read(path).map_err(|e| Error::Checkpoint {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let (nu, t, field) = decode(&bytes, path)?;
    Ok(Checkpoint { sample, t, nu, field })
}

/// Loads every `chk_NNNNNN.bin` in `dir`, keyed by sample index.
pub fn read_dir<T: Real>(dir: &Path) -> Result<BTreeMap<usize, Checkpoint<T>>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Checkpoint {
        path: dir.to_path_buf(),
        reason: e.to_string(),
    })?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|s| s.to_str()) else {
            continue;
        };
        let Some(sample) = name
            .strip_prefix("chk_")
            .and_then(|s| s.strip_suffix(".bin"))
            .and_then(|s| s.parse::<usize>().ok())
        else {
            continue;
        };
        out.insert(sample, read(&path, sample)?);
    }
    Ok(out)
}
