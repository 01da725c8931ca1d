//! Measurement apparatus over models: recurrent-spectrum extraction,
//! the eigen-domain (IIR) reconstruction oracle for linear cells,
//! hidden-state PCA scatters, and multi-seed learning-curve averaging.

mod curves;
mod iir;
mod scatter;
mod spectrum;

pub use curves::{average_curves, CurveBundle};
pub use iir::{eigenbasis_condition, iir_reconstruct};
pub use scatter::{hidden_scatter, ScatterPlot};
pub use spectrum::{recurrent_spectrum, SpectrumSnapshot};
