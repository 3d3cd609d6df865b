//! Layer checkpoints: a binary snapshot of one complete layer, from which a
//! run can resume (all counts up to the layer index are recoverable from a
//! single layer, so one file suffices).
//!
//! Format, all integers little-endian:
//! * header — magic `OSEQLYR1`, format version `u32`, layer index `p: u32`,
//!   degree cap `D: u32`;
//! * body — entries row-major, `n = 0..D`, `k = 0..=n`: a `u32` count of
//!   nonzero coefficients, then per coefficient its degree (`u32`) and a
//!   length-prefixed little-endian magnitude (`u32` length, then bytes).
//!
//! Readers validate structurally: magic and version, degrees strictly
//! ascending and within `1..=D`, magnitudes canonical (no trailing zero
//! byte) and nonzero, no trailing garbage after the last entry.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read as _, Write as _};
use std::path::Path;

use crate::engine::{Layer, TruncPoly};
use crate::error::{Error, Result};
use crate::BigCount;

const MAGIC: &[u8; 8] = b"OSEQLYR1";
const VERSION: u32 = 1;
/// Guard against absurd allocations from corrupt length fields; genuine
/// coefficient magnitudes are far smaller.
const MAX_COEFF_BYTES: u32 = 1 << 28;

/// One entry's nonzero coefficients, ascending by degree.
pub(crate) type SparseEntry = Vec<(u32, BigCount)>;

fn corrupt(path: &Path, what: impl std::fmt::Display) -> Error {
    Error::Checkpoint(format!("{}: {}", path.display(), what))
}

/// Reads just `(p, degree_cap)` from a checkpoint header.
pub(crate) fn peek_header(path: &Path) -> Result<(u32, u32)> {
    let file = File::open(path).map_err(|e| Error::io(e, path))?;
    let mut rd = Rd { r: BufReader::new(file), path };
    rd.header()
}

/// Streams a checkpoint into `sink`, called once per triangle entry in
/// row-major order (including empty entries). Returns `(p, degree_cap)`.
pub(crate) fn read_stream(
    path: &Path,
    sink: &mut dyn FnMut(u32, u32, SparseEntry) -> Result<()>,
) -> Result<(u32, u32)> {
    let file = File::open(path).map_err(|e| Error::io(e, path))?;
    let mut rd = Rd { r: BufReader::new(file), path };
    let (p, cap) = rd.header()?;
    for n in 0..cap {
        for k in 0..=n {
            let entry = rd.entry(cap)?;
            sink(n, k, entry)?;
        }
    }
    let mut probe = [0u8; 1];
    match rd.r.read(&mut probe) {
        Ok(0) => Ok((p, cap)),
        Ok(_) => Err(corrupt(path, "trailing data after the last entry")),
        Err(e) => Err(Error::io(e, path)),
    }
}

/// Writes a checkpoint atomically (temporary file, then rename), pulling
/// each entry's nonzero coefficients from `emit` in row-major order.
pub(crate) fn write_atomic(
    path: &Path,
    p: u32,
    degree_cap: u32,
    emit: &mut dyn FnMut(u32, u32) -> SparseEntry,
) -> Result<()> {
    let tmp = path.with_extension("ckpt.tmp");
    let res = write_to(&tmp, p, degree_cap, emit)
        .and_then(|()| fs::rename(&tmp, path).map_err(|e| Error::io(e, path)));
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    res
}

fn write_to(
    path: &Path,
    p: u32,
    degree_cap: u32,
    emit: &mut dyn FnMut(u32, u32) -> SparseEntry,
) -> Result<()> {
    let ioerr = |e| Error::io(e, path);
    let file = File::create(path).map_err(ioerr)?;
    let mut w = BufWriter::new(file);
    w.write_all(MAGIC).map_err(ioerr)?;
    for v in [VERSION, p, degree_cap] {
        w.write_all(&v.to_le_bytes()).map_err(ioerr)?;
    }
    for n in 0..degree_cap {
        for k in 0..=n {
            let entry = emit(n, k);
            w.write_all(&(entry.len() as u32).to_le_bytes()).map_err(ioerr)?;
            for (degree, value) in &entry {
                debug_assert!(*degree >= 1 && *degree <= degree_cap);
                debug_assert!(value != &BigCount::ZERO);
                let bytes = value.to_bytes_le();
                w.write_all(&degree.to_le_bytes()).map_err(ioerr)?;
                w.write_all(&(bytes.len() as u32).to_le_bytes()).map_err(ioerr)?;
                w.write_all(&bytes).map_err(ioerr)?;
            }
        }
    }
    w.flush().map_err(ioerr)?;
    w.into_inner()
        .map_err(|e| Error::io(e.into_error(), path))?
        .sync_all()
        .map_err(ioerr)
}

/// Saves a layer to `path` (see the module docs for the format).
pub fn save_layer(layer: &Layer, path: &Path) -> Result<()> {
    let mut emit = |n: u32, k: u32| -> SparseEntry {
        let Some(poly) = layer.entry(n, k) else {
            return Vec::new();
        };
        poly.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| *c != &BigCount::ZERO)
            .map(|(d, c)| (d as u32, c.clone()))
            .collect()
    };
    write_atomic(path, layer.p(), layer.degree_cap(), &mut emit)
}

/// Loads a layer saved by [`save_layer`] (or by a run's periodic snapshot),
/// materializing it densely — intended for moderate degree caps.
pub fn load_layer(path: &Path) -> Result<Layer> {
    // Peek the cap first so the sink can size its polynomials in one pass.
    let (_, cap) = peek_header(path)?;
    let mut rows: Vec<Vec<TruncPoly>> = Vec::new();
    let mut sink = |n: u32, k: u32, entry: SparseEntry| -> Result<()> {
        if k == 0 {
            rows.push(Vec::with_capacity(n as usize + 1));
        }
        let mut poly = TruncPoly::zero(cap);
        for (d, v) in entry {
            poly.coeffs_mut()[d as usize] = v;
        }
        rows.last_mut().expect("row pushed above").push(poly);
        Ok(())
    };
    let (p, _) = read_stream(path, &mut sink)?;
    Layer::from_rows(p, cap, rows)
}

struct Rd<'a> {
    r: BufReader<File>,
    path: &'a Path,
}

impl Rd<'_> {
    fn u32(&mut self) -> Result<u32> {
        let mut buf = [0u8; 4];
        self.read_exact(&mut buf)?;
        Ok(u32::from_le_bytes(buf))
    }

    fn read_exact(&mut self, buf: &mut [u8]) -> Result<()> {
        self.r.read_exact(buf).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                corrupt(self.path, "file is truncated")
            } else {
                Error::io(e, self.path)
            }
        })
    }

    fn header(&mut self) -> Result<(u32, u32)> {
        let mut magic = [0u8; 8];
        self.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(corrupt(self.path, "not a layer checkpoint (bad magic)"));
        }
        let version = self.u32()?;
        if version != VERSION {
            return Err(corrupt(self.path, format!("unsupported format version {version}")));
        }
        let p = self.u32()?;
        let cap = self.u32()?;
        if p == 0 || cap == 0 {
            return Err(corrupt(self.path, "layer index and degree cap must be positive"));
        }
        Ok((p, cap))
    }

    fn entry(&mut self, cap: u32) -> Result<SparseEntry> {
        let count = self.u32()?;
        if count > cap {
            return Err(corrupt(
                self.path,
                format!("entry claims {count} coefficients with a cap of {cap}"),
            ));
        }
        let mut entry = Vec::with_capacity(count as usize);
        let mut prev_degree = 0u32;
        for _ in 0..count {
            let degree = self.u32()?;
            if degree == 0 || degree > cap {
                return Err(corrupt(self.path, format!("degree {degree} outside 1..={cap}")));
            }
            if degree <= prev_degree {
                return Err(corrupt(self.path, "degrees are not strictly ascending"));
            }
            prev_degree = degree;
            let len = self.u32()?;
            if len == 0 || len > MAX_COEFF_BYTES {
                return Err(corrupt(self.path, format!("coefficient byte length {len}")));
            }
            let mut bytes = vec![0u8; len as usize];
            self.read_exact(&mut bytes)?;
            if bytes.last() == Some(&0) {
                return Err(corrupt(self.path, "non-canonical coefficient magnitude"));
            }
            entry.push((degree, BigCount::from_bytes_le(&bytes)));
        }
        Ok(entry)
    }
}
