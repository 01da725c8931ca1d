//! A small laboratory for studying the spectral dynamics of recurrent
//! networks.
//!
//! The crate provides:
//!
//! - [`linalg`]: dense row-major matrices, a counter-based reproducible RNG,
//!   a non-symmetric eigensolver (balancing + Hessenberg + shifted QR), and
//!   PCA on small covariance matrices.
//! - [`initializers`]: weight initialization schemes (uniform, Xavier,
//!   Kaiming, identity, normalized-positive, and an eigenvalue-preserving
//!   scheme built from plane rotations), plus ordered eigenvalue-norm
//!   statistics over repeated draws.
//! - [`nets`]: linear/tanh/relu RNN, LSTM, and GRU cells with exact
//!   backpropagation through time, MSE and label-smoothed cross-entropy
//!   losses, Adam, a seed-reproducible training loop with spectrum
//!   snapshots, and versioned binary checkpoints.
//! - [`data`]: Tomita grammar string sets, the Mackey-Glass delay series,
//!   and scanline MNIST from IDX files.
//! - [`analysis`]: recurrent-block spectra, the eigen-domain IIR
//!   reconstruction of linear state dynamics, hidden-state PCA scatters,
//!   and multi-seed curve averaging.
//!
//! All numeric code is generic over the scalar type through [`Scalar`];
//! `f64` is the default used by the concrete aliases below.

pub mod analysis;
pub mod data;
pub mod error;
pub mod initializers;
pub mod linalg;
pub mod nets;
pub mod scalar;

pub use error::{Error, Result};
pub use linalg::{EigenSpectrum, Matrix, Rng};
pub use scalar::Scalar;

/// Default-precision matrix.
pub type Mat = Matrix<f64>;
/// Default-precision eigenvalue spectrum.
pub type Spectrum = EigenSpectrum<f64>;
/// Single-precision matrix.
pub type Mat32 = Matrix<f32>;
/// Single-precision eigenvalue spectrum.
pub type Spectrum32 = EigenSpectrum<f32>;
