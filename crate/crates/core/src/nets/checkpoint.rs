//! Versioned binary model checkpoints.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! offset 0   magic   b"ERNNCKPT"
//! offset 8   u32     format version (currently 1)
//! offset 12  u8      cell kind tag (0 linear, 1 tanh, 2 relu, 3 lstm, 4 gru)
//! offset 13  u32×3   input, hidden, output sizes
//! offset 25  u32     block count
//! then, per block in directory order:
//!            u32     name length, followed by the UTF-8 name
//!            u32×2   rows, cols
//!            f64×rc  row-major entries
//! ```
//!
//! Values are stored as f64 regardless of the in-memory scalar type.
//! Any header or directory disagreement is a hard error naming the
//! byte offset; a version mismatch is never silently upgraded.

use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

use super::cell::{CellKind, CellParams};

const MAGIC: &[u8; 8] = b"ERNNCKPT";
const VERSION: u32 = 1;

fn kind_tag(kind: CellKind) -> u8 {
    match kind {
        CellKind::LinearRnn => 0,
        CellKind::TanhRnn => 1,
        CellKind::ReluRnn => 2,
        CellKind::Lstm => 3,
        CellKind::Gru => 4,
    }
}

fn kind_from_tag(tag: u8, offset: usize) -> Result<CellKind> {
    match tag {
        0 => Ok(CellKind::LinearRnn),
        1 => Ok(CellKind::TanhRnn),
        2 => Ok(CellKind::ReluRnn),
        3 => Ok(CellKind::Lstm),
        4 => Ok(CellKind::Gru),
        other => Err(Error::Format {
            offset,
            details: format!("unknown cell kind tag {other}"),
        }),
    }
}

/// Serialize a model to the checkpoint byte format.
pub fn checkpoint_bytes<T: Scalar>(params: &CellParams<T>) -> Vec<u8> {
    let blocks = params.blocks();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(kind_tag(params.kind()));
    out.extend_from_slice(&(params.input_size() as u32).to_le_bytes());
    out.extend_from_slice(&(params.hidden_size() as u32).to_le_bytes());
    out.extend_from_slice(&(params.output_size() as u32).to_le_bytes());
    out.extend_from_slice(&(blocks.len() as u32).to_le_bytes());
    for (name, m) in blocks {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
        out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
        for v in m.as_slice() {
            out.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.offset + len > self.bytes.len() {
            return Err(Error::Format {
                offset: self.offset,
                details: format!(
                    "truncated while reading {what}: need {len} bytes, {} remain",
                    self.bytes.len() - self.offset
                ),
            });
        }
        let slice = &self.bytes[self.offset..self.offset + len];
        self.offset += len;
        Ok(slice)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

/// Reconstruct a model from checkpoint bytes.
pub fn checkpoint_from_bytes<T: Scalar>(bytes: &[u8]) -> Result<CellParams<T>> {
    let mut cur = Cursor { bytes, offset: 0 };
    let magic = cur.take(8, "magic")?;
    if magic != MAGIC {
        return Err(Error::Format {
            offset: 0,
            details: format!("bad magic {magic:02x?}, expected {MAGIC:02x?}"),
        });
    }
    let version_offset = cur.offset;
    let version = cur.u32("version")?;
    if version != VERSION {
        return Err(Error::Format {
            offset: version_offset,
            details: format!("unsupported checkpoint version {version}, expected {VERSION}"),
        });
    }
    let tag_offset = cur.offset;
    let tag = cur.take(1, "cell kind tag")?[0];
    let kind = kind_from_tag(tag, tag_offset)?;
    let input = cur.u32("input size")? as usize;
    let hidden = cur.u32("hidden size")? as usize;
    let output = cur.u32("output size")? as usize;
    let count_offset = cur.offset;
    let count = cur.u32("block count")? as usize;

    let mut params = CellParams::<T>::zeros(kind, input, hidden, output);
    let expected: Vec<String> = params.blocks().into_iter().map(|(n, _)| n).collect();
    if count != expected.len() {
        return Err(Error::Format {
            offset: count_offset,
            details: format!(
                "{count} blocks declared, {} expected for a {} cell",
                expected.len(),
                kind.name()
            ),
        });
    }
    for (idx, want) in expected.iter().enumerate() {
        let name_offset = cur.offset;
        let name_len = cur.u32("block name length")? as usize;
        let name_bytes = cur.take(name_len, "block name")?;
        let name = std::str::from_utf8(name_bytes).map_err(|_| Error::Format {
            offset: name_offset,
            details: "block name is not UTF-8".into(),
        })?;
        if name != want {
            return Err(Error::Format {
                offset: name_offset,
                details: format!("block {idx} is named '{name}', expected '{want}'"),
            });
        }
        let shape_offset = cur.offset;
        let rows = cur.u32("block rows")? as usize;
        let cols = cur.u32("block cols")? as usize;
        {
            let mut blocks = params.blocks_mut();
            let target = &mut blocks[idx].1;
            if (rows, cols) != target.shape() {
                return Err(Error::Format {
                    offset: shape_offset,
                    details: format!(
                        "block '{want}' is {rows}x{cols}, expected {:?}",
                        target.shape()
                    ),
                });
            }
            let data = cur.take(rows * cols * 8, "block data")?;
            for (slot, chunk) in target.as_mut_slice().iter_mut().zip(data.chunks_exact(8)) {
                let mut raw = [0u8; 8];
                raw.copy_from_slice(chunk);
                *slot = lit::<T>(f64::from_le_bytes(raw));
            }
        }
    }
    if cur.offset != bytes.len() {
        return Err(Error::Format {
            offset: cur.offset,
            details: format!("{} trailing bytes after final block", bytes.len() - cur.offset),
        });
    }
    params.validate()?;
    Ok(params)
}

/// Write a model checkpoint to `path`.
pub fn save_checkpoint<T: Scalar>(params: &CellParams<T>, path: &Path) -> Result<()> {
    std::fs::write(path, checkpoint_bytes(params))?;
    Ok(())
}

/// Load a model checkpoint from `path`.
pub fn load_checkpoint<T: Scalar>(path: &Path) -> Result<CellParams<T>> {
    let bytes = std::fs::read(path)?;
    checkpoint_from_bytes(&bytes)
}
