//! Spectra of a model's recurrent blocks.

use crate::error::Result;
use crate::linalg::{eigenvalues, EigenSpectrum};
use crate::nets::CellParams;
use crate::scalar::Scalar;

/// Per-block eigen-spectra of one model at one training epoch.
#[derive(Debug, Clone)]
pub struct SpectrumSnapshot<T> {
    epoch: usize,
    blocks: Vec<(String, EigenSpectrum<T>)>,
}

impl<T: Scalar> SpectrumSnapshot<T> {
    /// Training epoch the snapshot was taken at.
    pub fn epoch(&self) -> usize {
        self.epoch
    }

    /// Named spectra, one per recurrent block, in gate order.
    pub fn blocks(&self) -> &[(String, EigenSpectrum<T>)] {
        &self.blocks
    }

    /// Largest eigenvalue modulus across every recurrent block.
    pub fn max_modulus(&self) -> T {
        let mut best = T::zero();
        for (_, spectrum) in &self.blocks {
            let m = spectrum.spectral_radius();
            if m > best {
                best = m;
            }
        }
        best
    }

    /// Top `k` unique moduli of one block (conjugate pairs collapsed,
    /// descending), fewer if the block has fewer unique moduli.
    pub fn top_unique_moduli(&self, block: &str, k: usize) -> Option<Vec<T>> {
        self.blocks.iter().find(|(name, _)| name == block).map(|(_, s)| {
            let mut m = s.unique_moduli();
            m.truncate(k);
            m
        })
    }

    /// Append `epoch,block,rank,modulus` CSV rows (no header) for every
    /// eigenvalue of every block, rank 1 = largest modulus.
    pub fn write_csv_rows(&self, out: &mut String) {
        for (name, spectrum) in &self.blocks {
            for (rank, m) in spectrum.moduli().iter().enumerate() {
                out.push_str(&format!(
                    "{},{name},{},{:.12}\n",
                    self.epoch,
                    rank + 1,
                    m.to_f64_lossy()
                ));
            }
        }
    }
}

/// Eigen-decompose every recurrent block of a model.
pub fn recurrent_spectrum<T: Scalar>(
    model: &CellParams<T>,
    epoch: usize,
) -> Result<SpectrumSnapshot<T>> {
    model.validate()?;
    let mut blocks = Vec::new();
    for (name, m) in model.recurrent_blocks() {
        blocks.push((name, eigenvalues(m)?));
    }
    Ok(SpectrumSnapshot { epoch, blocks })
}
