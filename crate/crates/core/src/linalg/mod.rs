//! Dense linear algebra: matrices, deterministic RNG, eigendecompositions
//! and PCA. Everything is implemented directly on row-major `Vec` storage
//! so results are reproducible bit-for-bit for a given scalar type.

mod eigen;
mod matrix;
mod pca;
mod rng;
mod symmetric;

pub use eigen::{eigenvalues, modulus, unique_moduli, EigenSpectrum};
pub(crate) use eigen::{complex_lu, complex_lu_solve, inverse_iteration};
pub use matrix::Matrix;
pub use pca::{pca, pca_project, Pca};
pub use rng::Rng;
pub use symmetric::symmetric_eigen;
