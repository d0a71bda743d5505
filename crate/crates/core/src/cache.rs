//! Binary on-disk cache for the isometry tower and the fusion cells.
//!
//! Layout (little endian): 8-byte magic, format version `u32`, `n u32`,
//! `kmax u32` (the degree for cells), tolerance `f64`, entry count `u32`,
//! then per entry three `u32` tags, `rows u64`, `cols u64` and the
//! column-major `f64` data.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use faer::Mat;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fusion::CoeffAlgebra;
use crate::qnum::QContext;
use crate::rep::IsometryTower;

pub const FORMAT_VERSION: u32 = 1;
const TOWER_MAGIC: &[u8; 8] = b"FONTOWER";
const CELLS_MAGIC: &[u8; 8] = b"FONCELLS";

#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub kind: CacheKind,
    pub version: u32,
    pub n: u32,
    pub kmax: u32,
    pub tol: f64,
    pub entries: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheKind {
    Tower,
    Cells,
}

impl CacheKind {
    fn magic(self) -> &'static [u8; 8] {
        match self {
            CacheKind::Tower => TOWER_MAGIC,
            CacheKind::Cells => CELLS_MAGIC,
        }
    }
}

struct Entry {
    tags: [u32; 3],
    mat: Mat<f64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn encode(kind: CacheKind, n: usize, kmax: usize, tol: f64, entries: &[(&[u32; 3], &Mat<f64>)]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(kind.magic());
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(kmax as u32).to_le_bytes());
    out.extend_from_slice(&tol.to_le_bytes());
    out.extend_from_slice(&(entries.len() as u32).to_le_bytes());
    for (tags, m) in entries {
        for t in *tags {
            out.extend_from_slice(&t.to_le_bytes());
        }
        out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
        out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
        for j in 0..m.ncols() {
            for x in m.col_as_slice(j) {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, len: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Cache("truncated cache file".into()))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn decode_header(r: &mut Reader<'_>) -> Result<Header> {
    let magic = r.take(8)?;
    let kind = if magic == TOWER_MAGIC {
        CacheKind::Tower
    } else if magic == CELLS_MAGIC {
        CacheKind::Cells
    } else {
        return Err(Error::Cache("unrecognized cache file".into()));
    };
    Ok(Header { kind, version: r.u32()?, n: r.u32()?, kmax: r.u32()?, tol: r.f64()?, entries: r.u32()? })
}

fn decode(bytes: &[u8]) -> Result<(Header, Vec<Entry>)> {
    let mut r = Reader { bytes, pos: 0 };
    let header = decode_header(&mut r)?;
    if header.version != FORMAT_VERSION {
        return Err(Error::Cache(format!("format version {} (expected {FORMAT_VERSION})", header.version)));
    }
    let mut entries = Vec::with_capacity(header.entries as usize);
    for _ in 0..header.entries {
        let tags = [r.u32()?, r.u32()?, r.u32()?];
        let (rows, cols) = (r.u64()? as usize, r.u64()? as usize);
        let len = rows.checked_mul(cols).ok_or_else(|| Error::Cache("matrix size overflow".into()))?;
        if len.saturating_mul(8) > bytes.len() {
            return Err(Error::Cache("truncated cache file".into()));
        }
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(r.f64()?);
        }
        entries.push(Entry { tags, mat: Mat::from_fn(rows, cols, |i, j| data[j * rows + i]) });
    }
    if r.pos != bytes.len() {
        return Err(Error::Cache("trailing bytes in cache file".into()));
    }
    Ok((header, entries))
}

fn check_header(h: &Header, kind: CacheKind, n: usize, kmax: usize, tol: f64) -> Result<()> {
    if h.kind != kind || h.n as usize != n || h.kmax as usize != kmax || h.tol != tol {
        return Err(Error::Cache(format!(
            "header mismatch: found {:?} n={} kmax={} tol={}, wanted {kind:?} n={n} kmax={kmax} tol={tol}",
            h.kind, h.n, h.kmax, h.tol
        )));
    }
    Ok(())
}

pub fn tower_path(dir: &Path, n: usize, kmax: usize) -> PathBuf {
    dir.join(format!("tower-n{n}-k{kmax}.bin"))
}

pub fn cells_path(dir: &Path, n: usize, degree: usize) -> PathBuf {
    dir.join(format!("cells-n{n}-d{degree}.bin"))
}

/// Serializes the tower; returns the SHA-256 of the written bytes.
pub fn write_tower(tower: &IsometryTower, tol: f64, path: &Path) -> Result<String> {
    let tags: Vec<[u32; 3]> = (0..=tower.kmax()).map(|k| [k as u32, 0, 0]).collect();
    let entries: Vec<_> = tags.iter().zip(&tower.iotas).collect();
    let bytes = encode(CacheKind::Tower, tower.n, tower.kmax(), tol, &entries);
    fs::write(path, &bytes)?;
    Ok(sha256_hex(&bytes))
}

pub fn read_tower(path: &Path, n: usize, kmax: usize, tol: f64) -> Result<(IsometryTower, String)> {
    let bytes = fs::read(path)?;
    let (header, entries) = decode(&bytes)?;
    check_header(&header, CacheKind::Tower, n, kmax, tol)?;
    let ctx = QContext::new(n)?;
    let mut iotas = Vec::with_capacity(entries.len());
    for (k, e) in entries.into_iter().enumerate() {
        if e.tags[0] as usize != k || e.mat.nrows() != n.pow(k as u32) || e.mat.ncols() != ctx.dim(k) {
            return Err(Error::Cache(format!("level {k} has the wrong shape")));
        }
        iotas.push(e.mat);
    }
    if iotas.len() != kmax + 1 {
        return Err(Error::Cache(format!("expected {} levels, found {}", kmax + 1, iotas.len())));
    }
    Ok((IsometryTower::from_iotas(ctx, iotas), sha256_hex(&bytes)))
}

/// Reads the cached tower if its header matches, otherwise builds and writes it.
/// The flag is `true` when the cache was reused.
pub fn load_or_build_tower(dir: &Path, n: usize, kmax: usize, tol: f64) -> Result<(IsometryTower, String, bool)> {
    let path = tower_path(dir, n, kmax);
    if path.exists() {
        if let Ok((tower, hash)) = read_tower(&path, n, kmax, tol) {
            return Ok((tower, hash, true));
        }
    }
    let tower = IsometryTower::build(kmax, &QContext::new(n)?)?;
    fs::create_dir_all(dir)?;
    let hash = write_tower(&tower, tol, &path)?;
    Ok((tower, hash, false))
}

pub fn write_cells(alg: &CoeffAlgebra, tol: f64, path: &Path) -> Result<String> {
    let mut keys: Vec<(usize, usize)> = alg.cells.keys().copied().collect();
    keys.sort_unstable();
    let mut tags = Vec::new();
    let mut mats = Vec::new();
    for key in keys {
        for (r, phi) in &alg.cells[&key] {
            tags.push([key.0 as u32, key.1 as u32, *r as u32]);
            mats.push(phi);
        }
    }
    let entries: Vec<_> = tags.iter().zip(mats).collect();
    let bytes = encode(CacheKind::Cells, alg.ctx.n, alg.degree, tol, &entries);
    fs::write(path, &bytes)?;
    Ok(sha256_hex(&bytes))
}

pub fn read_cells(path: &Path, tower: &IsometryTower, degree: usize, tol: f64) -> Result<CoeffAlgebra> {
    let bytes = fs::read(path)?;
    let (header, entries) = decode(&bytes)?;
    check_header(&header, CacheKind::Cells, tower.n, degree, tol)?;
    let mut cells: HashMap<(usize, usize), Vec<(usize, Mat<f64>)>> = HashMap::new();
    for e in entries {
        let [k, l, r] = e.tags.map(|t| t as usize);
        if k > degree || l > degree || e.mat.nrows() != tower.dim(k) * tower.dim(l) || e.mat.ncols() != tower.dim(r) {
            return Err(Error::Cache(format!("cell ({k}, {l}, {r}) has the wrong shape")));
        }
        cells.entry((k, l)).or_default().push((r, e.mat));
    }
    let expected: usize = (0..=degree).flat_map(|k| (0..=degree).map(move |l| k.min(l) + 1)).sum();
    if cells.values().map(Vec::len).sum::<usize>() != expected {
        return Err(Error::Cache("incomplete cell table".into()));
    }
    CoeffAlgebra::from_cells(degree, tower, cells)
}

pub fn load_or_build_cells(dir: &Path, tower: &IsometryTower, degree: usize, tol: f64) -> Result<(CoeffAlgebra, bool)> {
    let path = cells_path(dir, tower.n, degree);
    if path.exists() {
        if let Ok(alg) = read_cells(&path, tower, degree, tol) {
            return Ok((alg, true));
        }
    }
    let alg = CoeffAlgebra::build(degree, tower)?;
    fs::create_dir_all(dir)?;
    write_cells(&alg, tol, &path)?;
    Ok((alg, false))
}

/// Header and hash of a cache file, without loading its matrices.
pub fn inspect(path: &Path) -> Result<(Header, String)> {
    let bytes = fs::read(path)?;
    let header = decode_header(&mut Reader { bytes: &bytes, pos: 0 })?;
    Ok((header, sha256_hex(&bytes)))
}
