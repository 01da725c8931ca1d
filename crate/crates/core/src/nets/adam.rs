//! Bias-corrected Adam without weight decay.
//!
//! Moments live in two [`CellParams`] bundles shaped exactly like the
//! model, so the update is a straight three-way zip over named blocks.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

use super::cell::CellParams;

/// Adam hyperparameters. Defaults: β₁=0.9, β₂=0.999, ε=1e-8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamConfig {
    /// Standard constants with the given learning rate.
    pub fn with_learning_rate(learning_rate: f64) -> AdamConfig {
        AdamConfig {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    /// Reject non-positive learning rates and out-of-range betas.
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        for (name, beta) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::Config(format!("{name} must be in [0, 1), got {beta}")));
            }
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// First/second moment estimates plus the shared step counter.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    m: CellParams<T>,
    v: CellParams<T>,
    t: u64,
}

impl<T: Scalar> AdamState<T> {
    /// Zero moments shaped like `template`.
    pub fn new(template: &CellParams<T>) -> AdamState<T> {
        AdamState {
            m: template.zeros_like(),
            v: template.zeros_like(),
            t: 0,
        }
    }

    /// Number of updates applied so far.
    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One in-place Adam update: `θ ← θ − lr·m̂/(√v̂ + ε)` with
/// bias-corrected moments. `grads` and `state` must share the model's
/// shape.
pub fn adam_step<T: Scalar>(
    params: &mut CellParams<T>,
    grads: &CellParams<T>,
    state: &mut AdamState<T>,
    config: &AdamConfig,
) -> Result<()> {
    config.validate()?;
    if grads.kind() != params.kind()
        || grads.hidden_size() != params.hidden_size()
        || grads.input_size() != params.input_size()
        || grads.output_size() != params.output_size()
    {
        return Err(Error::dim(
            "adam_step",
            "gradient bundle shape does not match parameters",
        ));
    }
    state.t += 1;
    let b1 = lit::<T>(config.beta1);
    let b2 = lit::<T>(config.beta2);
    let one = T::one();
    let corr1 = one - lit::<T>(config.beta1.powi(state.t as i32));
    let corr2 = one - lit::<T>(config.beta2.powi(state.t as i32));
    let lr = lit::<T>(config.learning_rate);
    let eps = lit::<T>(config.epsilon);

    let mut p_blocks = params.blocks_mut();
    let g_blocks = grads.blocks();
    let mut m_blocks = state.m.blocks_mut();
    let mut v_blocks = state.v.blocks_mut();
    for i in 0..p_blocks.len() {
        let p = p_blocks[i].1.as_mut_slice();
        let g = g_blocks[i].1.as_slice();
        let m = m_blocks[i].1.as_mut_slice();
        let v = v_blocks[i].1.as_mut_slice();
        if p.len() != g.len() {
            return Err(Error::dim(
                "adam_step",
                format!("block '{}' size mismatch", g_blocks[i].0),
            ));
        }
        for j in 0..p.len() {
            m[j] = b1 * m[j] + (one - b1) * g[j];
            v[j] = b2 * v[j] + (one - b2) * g[j] * g[j];
            let m_hat = m[j] / corr1;
            let v_hat = v[j] / corr2;
            p[j] = p[j] - lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}
