//! IDX-format MNIST ingestion for scanline sequence classification.
//!
//! Images arrive as the classic big-endian IDX pair: an image file
//! (magic 0x00000803, then count/rows/cols and raw bytes) and a label
//! file (magic 0x00000801, then count and one byte per label). Each
//! image becomes a rows-step sequence of cols-dimensional pixel rows
//! scaled to [0,1] — an H×W grid is read top row first, matching the
//! row-by-row scan order of the sequence task.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{lit, Scalar};

use super::{Label, LabeledSequenceSet, SequenceSample, Task};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

struct Cursor<'a> {
    bytes: &'a [u8],
    offset: usize,
    file: &'static str,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.offset + len > self.bytes.len() {
            return Err(Error::Format {
                offset: self.offset,
                details: format!(
                    "{} file truncated while reading {what}: need {len} bytes, {} remain",
                    self.file,
                    self.bytes.len() - self.offset
                ),
            });
        }
        let s = &self.bytes[self.offset..self.offset + len];
        self.offset += len;
        Ok(s)
    }

    fn u32_be(&mut self, what: &str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }
}

fn check_magic(cur: &mut Cursor<'_>, want: u32) -> Result<()> {
    let offset = cur.offset;
    let got = cur.u32_be("magic")?;
    if got != want {
        return Err(Error::Format {
            offset,
            details: format!(
                "{} file has magic {got:#010x}, expected {want:#010x}",
                cur.file
            ),
        });
    }
    Ok(())
}

/// Parse an IDX image/label byte pair into a ten-class sequence set.
pub fn mnist_from_bytes<T: Scalar>(
    images: &[u8],
    labels: &[u8],
) -> Result<LabeledSequenceSet<T>> {
    let mut img = Cursor {
        bytes: images,
        offset: 0,
        file: "images",
    };
    check_magic(&mut img, IMAGES_MAGIC)?;
    let count = img.u32_be("image count")? as usize;
    let rows = img.u32_be("row count")? as usize;
    let cols = img.u32_be("column count")? as usize;
    if count == 0 || rows == 0 || cols == 0 {
        return Err(Error::Format {
            offset: 4,
            details: format!("images file declares empty dimensions {count}x{rows}x{cols}"),
        });
    }
    let pixels = img.take(count * rows * cols, "pixel payload")?;
    if img.offset != images.len() {
        return Err(Error::Format {
            offset: img.offset,
            details: format!(
                "images file has {} trailing bytes",
                images.len() - img.offset
            ),
        });
    }

    let mut lab = Cursor {
        bytes: labels,
        offset: 0,
        file: "labels",
    };
    check_magic(&mut lab, LABELS_MAGIC)?;
    let label_count_offset = lab.offset;
    let label_count = lab.u32_be("label count")? as usize;
    if label_count != count {
        return Err(Error::Format {
            offset: label_count_offset,
            details: format!(
                "images file declares {count} items, labels file declares {label_count}"
            ),
        });
    }
    let label_bytes = lab.take(count, "label payload")?;
    if lab.offset != labels.len() {
        return Err(Error::Format {
            offset: lab.offset,
            details: format!(
                "labels file has {} trailing bytes",
                labels.len() - lab.offset
            ),
        });
    }

    let scale = T::one() / lit::<T>(255.0);
    let mut sequences = Vec::with_capacity(count);
    for i in 0..count {
        let mut steps = Matrix::<T>::zeros(rows, cols);
        let base = i * rows * cols;
        for r in 0..rows {
            for c in 0..cols {
                steps[(r, c)] = lit::<T>(pixels[base + r * cols + c] as f64) * scale;
            }
        }
        sequences.push(SequenceSample {
            steps,
            label: Label::Class(label_bytes[i] as usize),
        });
    }
    LabeledSequenceSet::new(Task::TenClass, sequences)
}

/// Load an IDX image/label file pair (see [`mnist_from_bytes`]).
pub fn load_mnist_idx<T: Scalar>(
    images_path: &Path,
    labels_path: &Path,
) -> Result<LabeledSequenceSet<T>> {
    let images = std::fs::read(images_path)?;
    let labels = std::fs::read(labels_path)?;
    mnist_from_bytes(&images, &labels)
}

/// Serialize a ten-class sequence set back to IDX bytes
/// `(images, labels)`.
///
/// Inverse of [`mnist_from_bytes`]: pixel bytes are recovered as
/// `round(v·255)`, so a loaded set reproduces its source files exactly.
pub fn mnist_idx_bytes<T: Scalar>(set: &LabeledSequenceSet<T>) -> Result<(Vec<u8>, Vec<u8>)> {
    if set.task() != Task::TenClass {
        return Err(Error::Config(format!(
            "idx serialization requires a ten_class set, got {}",
            set.task().name()
        )));
    }
    let shape = set.sequences()[0].steps.shape();
    let (rows, cols) = shape;
    let count = set.len();
    let mut images = Vec::with_capacity(16 + count * rows * cols);
    images.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
    images.extend_from_slice(&(count as u32).to_be_bytes());
    images.extend_from_slice(&(rows as u32).to_be_bytes());
    images.extend_from_slice(&(cols as u32).to_be_bytes());
    let mut labels = Vec::with_capacity(8 + count);
    labels.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    labels.extend_from_slice(&(count as u32).to_be_bytes());
    for (i, s) in set.sequences().iter().enumerate() {
        if s.steps.shape() != shape {
            return Err(Error::dim(
                "mnist_idx_bytes",
                format!(
                    "sequence {i} is {:?}, expected uniform {shape:?}",
                    s.steps.shape()
                ),
            ));
        }
        for v in s.steps.as_slice() {
            let f = v.to_f64_lossy();
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::Config(format!(
                    "sequence {i} holds pixel value {f} outside [0,1]"
                )));
            }
            images.push((f * 255.0).round() as u8);
        }
        match s.label {
            Label::Class(c) => labels.push(c as u8),
            ref other => {
                return Err(Error::Config(format!(
                    "sequence {i} has non-class label {other:?}"
                )))
            }
        }
    }
    Ok((images, labels))
}

/// Write a ten-class sequence set as an IDX image/label file pair.
pub fn save_mnist_idx<T: Scalar>(
    set: &LabeledSequenceSet<T>,
    images_path: &Path,
    labels_path: &Path,
) -> Result<()> {
    let (images, labels) = mnist_idx_bytes(set)?;
    std::fs::write(images_path, images)?;
    std::fs::write(labels_path, labels)?;
    Ok(())
}
