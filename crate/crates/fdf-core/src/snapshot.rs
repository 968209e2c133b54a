//! Binary state files: magic `FDF1`, then little-endian `u64 n`,
//! `f64 length`, `f64 time`, `f64 delta` (zero for depthless equations),
//! then `n` consecutive `f64` field values in grid order. Writing and
//! reading are bit-exact inverses.

use std::path::Path;

use crate::dispersion::EquationSpec;
use crate::dynamics::SimState;
use crate::spectral::{Field, SpectralGrid};
use crate::{FdfError, Result};

const MAGIC: &[u8; 4] = b"FDF1";
const HEADER_LEN: usize = 4 + 8 + 8 + 8 + 8;

/// Decoded contents of a state file.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: u64,
    pub length: f64,
    pub time: f64,
    /// Depth parameter of the run that wrote the file; zero when the
    /// equation has none.
    pub delta: f64,
    pub values: Vec<f64>,
}

impl Snapshot {
    /// Rebuilds the grid-attached field, re-validating grid shape and
    /// finiteness.
    pub fn field(&self) -> Result<Field> {
        let grid = SpectralGrid::new(self.n as usize, self.length)?;
        Field::new(grid, self.values.clone())
    }
}

/// Serializes a snapshot to its file bytes.
pub fn encode_snapshot(snapshot: &Snapshot) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(HEADER_LEN + 8 * snapshot.values.len());
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&snapshot.n.to_le_bytes());
    bytes.extend_from_slice(&snapshot.length.to_le_bytes());
    bytes.extend_from_slice(&snapshot.time.to_le_bytes());
    bytes.extend_from_slice(&snapshot.delta.to_le_bytes());
    for v in &snapshot.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    bytes
}

/// Parses snapshot bytes, rejecting a wrong magic, a short file, and any
/// disagreement between the declared `n` and the payload size.
pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    if bytes.len() < 4 {
        return Err(FdfError::Snapshot(format!(
            "truncated file: {} bytes is shorter than the 4-byte magic",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(FdfError::Snapshot(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&bytes[..4]),
            String::from_utf8_lossy(MAGIC)
        )));
    }
    if bytes.len() < HEADER_LEN {
        return Err(FdfError::Snapshot(format!(
            "truncated file: {} bytes cannot hold the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    let f64_at = |offset: usize| -> f64 {
        f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap())
    };
    let n = u64::from_le_bytes(bytes[4..12].try_into().unwrap());
    let expected = (n as usize)
        .checked_mul(8)
        .and_then(|p| p.checked_add(HEADER_LEN));
    if expected != Some(bytes.len()) {
        return Err(FdfError::Snapshot(format!(
            "header declares n = {n} values but the file holds {} payload bytes \
             ({} would be needed)",
            bytes.len() - HEADER_LEN,
            8 * n
        )));
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|chunk| f64::from_le_bytes(chunk.try_into().unwrap()))
        .collect();
    Ok(Snapshot {
        n,
        length: f64_at(12),
        time: f64_at(20),
        delta: f64_at(28),
        values,
    })
}

/// Writes a run state to `path` in the snapshot format; the depth field
/// comes from the equation (zero when it has none).
pub fn write_snapshot(state: &SimState, eq: &EquationSpec, path: &Path) -> Result<()> {
    let grid = state.field.grid();
    let snapshot = Snapshot {
        n: grid.n() as u64,
        length: grid.length(),
        time: state.time,
        delta: eq.dispersion.depth().unwrap_or(0.0),
        values: state.field.values().to_vec(),
    };
    std::fs::write(path, encode_snapshot(&snapshot))?;
    Ok(())
}

/// Reads and validates a snapshot file.
pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    decode_snapshot(&std::fs::read(path)?)
}
