//! Content-addressed on-disk store for parity spectra.
//!
//! Files are named by the SHA-256 of their header and never rewritten.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{diagonalize_by_parity, BlockBasis, ParitySpectrum, Sector};
use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelSpec};

const MAGIC: &[u8; 8] = b"NTQPTSP1";
const VERSION: u64 = 1;

#[derive(Debug, Clone)]
pub struct SpectrumCache {
    dir: PathBuf,
}

fn model_code(m: ModelKind) -> u64 {
    match m {
        ModelKind::Bh => 0,
        ModelKind::Lmg => 1,
        ModelKind::Dicke => 2,
    }
}

fn header(spec: &ModelSpec) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 4 * 8 + 4 * 8);
    out.extend_from_slice(MAGIC);
    for v in [VERSION, model_code(spec.model), spec.n as u64, spec.n_max.unwrap_or(0) as u64] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in [spec.lambda, spec.j_hop, spec.omega, spec.omega0] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn push_f64s(out: &mut Vec<u8>, values: &[f64]) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Cache("truncated cache file".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.take(n.checked_mul(8).ok_or_else(|| Error::Cache("corrupt length".into()))?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }
}

pub fn encode(spectrum: &ParitySpectrum) -> Vec<u8> {
    let mut out = header(&spectrum.spec);
    for s in [&spectrum.plus, &spectrum.minus] {
        out.extend_from_slice(&(s.len() as u64).to_le_bytes());
        push_f64s(&mut out, &s.values);
        push_f64s(&mut out, s.block_vectors());
    }
    out
}

pub fn decode(spec: &ModelSpec, bytes: &[u8]) -> Result<ParitySpectrum> {
    let head = header(spec);
    if bytes.len() < head.len() || bytes[..head.len()] != head[..] {
        return Err(Error::Cache("header mismatch".into()));
    }
    let mut r = Reader {
        bytes,
        pos: head.len(),
    };
    let mut sectors = Vec::with_capacity(2);
    for parity in [1i8, -1] {
        let basis = BlockBasis::for_spec(spec, parity);
        let dim = r.u64()? as usize;
        if dim != basis.dim() {
            return Err(Error::Cache(format!("sector {parity} has {dim} levels, expected {}", basis.dim())));
        }
        let values = r.f64s(dim)?;
        let vectors = r.f64s(dim * dim)?;
        sectors.push(Sector::from_parts(parity, basis, values, vectors)?);
    }
    if r.pos != bytes.len() {
        return Err(Error::Cache("trailing bytes".into()));
    }
    let minus = sectors.pop().expect("two sectors");
    let plus = sectors.pop().expect("two sectors");
    Ok(ParitySpectrum::from_sectors(*spec, plus, minus))
}

impl SpectrumCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(spec: &ModelSpec) -> String {
        Sha256::digest(header(spec)).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn path(&self, spec: &ModelSpec) -> PathBuf {
        self.dir.join(format!("{}.bin", Self::key(spec)))
    }

    /// Cached spectrum for `spec`, or `None` when absent.
    pub fn load(&self, spec: &ModelSpec) -> Result<Option<ParitySpectrum>> {
        let path = self.path(spec);
        match fs::read(&path) {
            Ok(bytes) => decode(spec, &bytes).map(Some),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::Cache(format!("{}: {e}", path.display()))),
        }
    }

    /// Writes `spectrum` unless an entry already exists.
    pub fn store(&self, spectrum: &ParitySpectrum) -> Result<()> {
        let path = self.path(&spectrum.spec);
        if path.exists() {
            return Ok(());
        }
        let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
        let tmp = self.dir.join(format!(
            ".{}.{}.{:?}.tmp",
            Self::key(&spectrum.spec),
            std::process::id(),
            std::thread::current().id()
        ));
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(&encode(spectrum)).map_err(io)?;
        f.sync_all().map_err(io)?;
        drop(f);
        if path.exists() {
            let _ = fs::remove_file(&tmp);
            return Ok(());
        }
        fs::rename(&tmp, &path).map_err(io)
    }

    pub fn get_or_compute(&self, spec: &ModelSpec) -> Result<ParitySpectrum> {
        if let Some(s) = self.load(spec)? {
            return Ok(s);
        }
        let s = diagonalize_by_parity(spec)?;
        self.store(&s)?;
        Ok(s)
    }
}

/// Diagonalizes through `cache` when one is given.
pub fn spectrum_for(spec: &ModelSpec, cache: Option<&SpectrumCache>) -> Result<ParitySpectrum> {
    match cache {
        Some(c) => c.get_or_compute(spec),
        None => diagonalize_by_parity(spec),
    }
}
