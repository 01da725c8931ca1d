//! Mackey-Glass delay differential equation, integrated by RK4.
//!
//! dx/dt = β·x(t−τ)/(1 + x(t−τ)¹⁰) − γ·x(t), the classic chaotic
//! benchmark at (β, γ, τ) = (0.2, 0.1, 17). Integration runs on a unit
//! grid (dt = 1) from the constant history x = 1.2; delayed values at
//! half-steps are linearly interpolated between grid points.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{lit, Scalar};

use super::{Label, LabeledSequenceSet, SequenceSample, Task};

/// Mackey-Glass coefficients. `Default` is the conventional benchmark
/// setting (β, γ, τ) = (0.2, 0.1, 17).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MackeyParams {
    pub beta: f64,
    pub gamma: f64,
    pub tau: f64,
}

impl Default for MackeyParams {
    fn default() -> MackeyParams {
        MackeyParams {
            beta: 0.2,
            gamma: 0.1,
            tau: 17.0,
        }
    }
}

impl MackeyParams {
    fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("gamma", self.gamma), ("tau", self.tau)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!(
                    "mackey-glass {name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Raw (un-standardized) series: grid values x_warmup … x_{warmup+length−1}.
pub fn mackey_glass_series(
    length: usize,
    params: &MackeyParams,
    warmup: usize,
) -> Result<Vec<f64>> {
    if length == 0 {
        return Err(Error::Config("mackey-glass length must be at least 1".into()));
    }
    params.validate()?;
    let total = warmup + length;
    let mut xs: Vec<f64> = Vec::with_capacity(total);
    xs.push(1.2);
    let delayed = |xs: &[f64], time: f64| -> f64 {
        if time <= 0.0 {
            return 1.2;
        }
        let i = time.floor();
        let frac = time - i;
        let i = i as usize;
        if frac == 0.0 {
            xs[i]
        } else {
            xs[i] * (1.0 - frac) + xs[i + 1] * frac
        }
    };
    let f = |x: f64, xd: f64| params.beta * xd / (1.0 + xd.powi(10)) - params.gamma * x;
    let mut t = 0.0f64;
    while xs.len() < total {
        let x = *xs.last().unwrap();
        let k1 = f(x, delayed(&xs, t - params.tau));
        let k2 = f(x + 0.5 * k1, delayed(&xs, t + 0.5 - params.tau));
        let k3 = f(x + 0.5 * k2, delayed(&xs, t + 0.5 - params.tau));
        let k4 = f(x + k3, delayed(&xs, t + 1.0 - params.tau));
        let next = x + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        if !next.is_finite() {
            return Err(Error::non_finite(
                "mackey_glass",
                format!("integration diverged at step {}", xs.len()),
            ));
        }
        xs.push(next);
        t += 1.0;
    }
    Ok(xs.split_off(warmup))
}

/// One-step-ahead prediction task on the Mackey-Glass series.
///
/// Integrates `length + 1` grid points after discarding `warmup`,
/// standardizes that window to zero mean and unit variance, and emits a
/// single sequence whose step-`t` input is the standardized x_t with
/// target x_{t+1}.
pub fn mackey_glass<T: Scalar>(
    length: usize,
    params: &MackeyParams,
    warmup: usize,
) -> Result<LabeledSequenceSet<T>> {
    if length < 2 {
        return Err(Error::Config(format!(
            "mackey-glass task needs length >= 2, got {length}"
        )));
    }
    let raw = mackey_glass_series(length + 1, params, warmup)?;
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let var = raw.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / raw.len() as f64;
    if var == 0.0 {
        return Err(Error::Generation(
            "mackey-glass series is constant; cannot standardize".into(),
        ));
    }
    let std = var.sqrt();
    let z: Vec<f64> = raw.iter().map(|v| (v - mean) / std).collect();

    let mut steps = Matrix::<T>::zeros(length, 1);
    let mut targets = Matrix::<T>::zeros(length, 1);
    for i in 0..length {
        steps[(i, 0)] = lit::<T>(z[i]);
        targets[(i, 0)] = lit::<T>(z[i + 1]);
    }
    LabeledSequenceSet::new(
        Task::Regression,
        vec![SequenceSample {
            steps,
            label: Label::Targets(targets),
        }],
    )
}
