//! Binary snapshots.
//!
//! Layout: the magic bytes `QNSF`, a one-byte format version, the header
//! length as a little-endian `u32`, the UTF-8 JSON header, then `7·n²`
//! little-endian `f64` values: the rasters `q11, q12, q13, q22, q23, u1, u2`
//! in that order, each row-major with sample `(i, j)` at `j·n + i`, where
//! `x = i·h` and `y = j·h`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rhs::State;
use crate::spectral::field::Field;
use crate::spectral::grid::Grid2D;
use crate::tensor::ModelParams;

pub const MAGIC: &[u8; 4] = b"QNSF";
pub const VERSION: u8 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("not a snapshot: bad magic bytes {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported snapshot version {found} (this build reads {VERSION})")]
    Version { found: u8 },
    #[error("truncated snapshot: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("snapshot has {0} trailing bytes")]
    Trailing(usize),
    #[error("malformed snapshot header: {0}")]
    Header(#[from] serde_json::Error),
    #[error("snapshot header inconsistent: {0}")]
    Inconsistent(String),
    #[error("snapshot io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub version: u8,
    pub grid_n: usize,
    pub box_len: f64,
    pub t: f64,
    pub params: ModelParams,
    pub seed: u64,
    pub scheme: String,
    pub step: usize,
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub state: State,
}

impl Snapshot {
    pub fn new(state: State, params: ModelParams, seed: u64, scheme: &str, step: usize) -> Self {
        let g = state.grid();
        let header = SnapshotHeader {
            version: VERSION,
            grid_n: g.n(),
            box_len: g.box_len(),
            t: state.t,
            params,
            seed,
            scheme: scheme.to_string(),
            step,
        };
        Snapshot { header, state }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, SnapshotError> {
        let header = serde_json::to_vec(&self.header)?;
        let n2 = self.state.grid().len();
        let mut out = Vec::with_capacity(9 + header.len() + 7 * 8 * n2);
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(&header);
        let rasters = self.state.q.components().iter().chain(self.state.u.components());
        for comp in rasters {
            for v in comp {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SnapshotError> {
        let need = |expected: usize| {
            if bytes.len() < expected {
                Err(SnapshotError::Truncated { expected, found: bytes.len() })
            } else {
                Ok(())
            }
        };
        need(4)?;
        let magic: [u8; 4] = bytes[..4].try_into().unwrap();
        if &magic != MAGIC {
            return Err(SnapshotError::BadMagic(magic));
        }
        need(9)?;
        if bytes[4] != VERSION {
            return Err(SnapshotError::Version { found: bytes[4] });
        }
        let hlen = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
        need(9 + hlen)?;
        let header: SnapshotHeader = serde_json::from_slice(&bytes[9..9 + hlen])?;
        if header.version != VERSION {
            return Err(SnapshotError::Inconsistent(format!("header version {} behind magic version {VERSION}", header.version)));
        }
        let grid = Grid2D::new(header.grid_n, header.box_len)
            .map_err(|e| SnapshotError::Inconsistent(e.to_string()))?;
        let n2 = grid.len();
        let start = 9 + hlen;
        let expected = start + 7 * 8 * n2;
        need(expected)?;
        if bytes.len() > expected {
            return Err(SnapshotError::Trailing(bytes.len() - expected));
        }
        let mut vals = bytes[start..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let mut raster = || (0..n2).map(|_| vals.next().unwrap()).collect::<Vec<f64>>();
        let q = Field::from_components(&grid, std::array::from_fn(|_| raster()));
        let u = Field::from_components(&grid, std::array::from_fn(|_| raster()));
        // Stored states were solenoidal when written; no re-check so the
        // round trip stays bitwise.
        let state = State { q, u, t: header.t };
        Ok(Snapshot { header, state })
    }
}

/// Writes `snap` atomically: a temporary sibling file is renamed into place.
pub fn write_snapshot(path: impl AsRef<Path>, snap: &Snapshot) -> Result<(), SnapshotError> {
    let path = path.as_ref();
    let bytes = snap.to_bytes()?;
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot, SnapshotError> {
    Snapshot::from_bytes(&fs::read(path)?)
}
