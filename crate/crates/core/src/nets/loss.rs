//! Training losses: mean-squared error and label-smoothed cross-entropy.
//!
//! Regression reads the readout at every timestep and averages squared
//! error over all of them; classification reads only the final timestep
//! and applies softmax + cross-entropy against a smoothed one-hot
//! target. `loss_grads` packages both conventions for the BPTT core.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{lit, Scalar};

/// Which training loss to apply to the readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossKind {
    /// Mean squared error over every timestep's outputs.
    Mse,
    /// Softmax cross-entropy on the final timestep, against
    /// `(1−ε)·onehot + ε/K` targets.
    CrossEntropy {
        /// Smoothing mass ε, in `[0, 1)`.
        label_smooth: f64,
    },
}

impl LossKind {
    /// Stable lowercase identifier used in configs.
    pub fn name(&self) -> &'static str {
        match self {
            LossKind::Mse => "mse",
            LossKind::CrossEntropy { .. } => "cross_entropy",
        }
    }

    /// Check parameter ranges (smoothing mass must lie in `[0, 1)`).
    pub fn validate(&self) -> Result<()> {
        if let LossKind::CrossEntropy { label_smooth } = self {
            if !(0.0..1.0).contains(label_smooth) {
                return Err(Error::Config(format!(
                    "label_smooth must be in [0, 1), got {label_smooth}"
                )));
            }
        }
        Ok(())
    }
}

/// Supervision for one batch of sequences.
#[derive(Debug, Clone)]
pub enum Targets<'a, T> {
    /// Per-timestep regression targets, one B×output matrix per step.
    Steps(&'a [Matrix<T>]),
    /// Class labels for the final timestep, one per batch row.
    Labels(&'a [usize]),
}

/// Mean of squared elementwise differences between two equal-shape
/// matrices.
pub fn loss_mse<T: Scalar>(pred: &Matrix<T>, target: &Matrix<T>) -> Result<T> {
    if pred.shape() != target.shape() {
        return Err(Error::dim(
            "loss_mse",
            format!("pred is {:?}, target is {:?}", pred.shape(), target.shape()),
        ));
    }
    let mut total = T::zero();
    for (p, a) in pred.as_slice().iter().zip(target.as_slice()) {
        let d = *p - *a;
        total = total + d * d;
    }
    Ok(total / lit::<T>(pred.as_slice().len() as f64))
}

/// Cross-entropy between `softmax(logits)` and smoothed one-hot targets
/// `q = (1−ε)·onehot(label) + ε/K`, averaged over the batch.
///
/// `logits` is B×K with one label per row; labels outside `[0, K)` are
/// rejected with the offending row named.
pub fn loss_ce_smoothed<T: Scalar>(
    logits: &Matrix<T>,
    labels: &[usize],
    smooth_eps: f64,
) -> Result<T> {
    LossKind::CrossEntropy {
        label_smooth: smooth_eps,
    }
    .validate()?;
    let (batch, classes) = logits.shape();
    if labels.len() != batch {
        return Err(Error::dim(
            "loss_ce_smoothed",
            format!("{} labels for a batch of {batch} rows", labels.len()),
        ));
    }
    if classes == 0 {
        return Err(Error::dim("loss_ce_smoothed", "zero classes"));
    }
    let eps = lit::<T>(smooth_eps);
    let uniform = eps / lit::<T>(classes as f64);
    let confident = T::one() - eps;
    let mut total = T::zero();
    for (b, &label) in labels.iter().enumerate() {
        if label >= classes {
            return Err(Error::dim(
                "loss_ce_smoothed",
                format!("label {label} at row {b} out of range for {classes} classes"),
            ));
        }
        // loss_b = logsumexp(z) − Σ_k q_k z_k, using Σ_k q_k = 1.
        let mut max = logits[(b, 0)];
        for k in 1..classes {
            if logits[(b, k)] > max {
                max = logits[(b, k)];
            }
        }
        let mut sum_exp = T::zero();
        let mut weighted = T::zero();
        for k in 0..classes {
            let z = logits[(b, k)];
            sum_exp = sum_exp + (z - max).exp();
            let q = if k == label { confident + uniform } else { uniform };
            weighted = weighted + q * z;
        }
        total = total + max + sum_exp.ln() - weighted;
    }
    Ok(total / lit::<T>(batch as f64))
}

/// Loss value plus per-step output gradients for a full trajectory.
///
/// MSE pairs with [`Targets::Steps`] and spreads the mean over all
/// `T·B·output` elements (gradient `2(Y−A)/(T·B·output)` at every
/// step). Cross-entropy pairs with [`Targets::Labels`] and touches only
/// the final step (gradient `(softmax(z) − q)/B`; earlier steps `None`).
pub(crate) fn loss_grads<T: Scalar>(
    outputs: &[Matrix<T>],
    targets: &Targets<'_, T>,
    loss: LossKind,
) -> Result<(T, Vec<Option<Matrix<T>>>)> {
    loss.validate()?;
    if outputs.is_empty() {
        return Err(Error::dim("loss", "empty output trajectory"));
    }
    match (loss, targets) {
        (LossKind::Mse, Targets::Steps(steps)) => {
            if steps.len() != outputs.len() {
                return Err(Error::dim(
                    "loss_mse",
                    format!("{} target steps for {} output steps", steps.len(), outputs.len()),
                ));
            }
            let per_step = outputs[0].as_slice().len();
            let denom = lit::<T>((outputs.len() * per_step) as f64);
            let scale = lit::<T>(2.0) / denom;
            let mut total = T::zero();
            let mut grads = Vec::with_capacity(outputs.len());
            for (t, (y, a)) in outputs.iter().zip(steps.iter()).enumerate() {
                if y.shape() != a.shape() {
                    return Err(Error::dim(
                        "loss_mse",
                        format!(
                            "timestep {t}: output is {:?}, target is {:?}",
                            y.shape(),
                            a.shape()
                        ),
                    ));
                }
                let mut g = y.sub(a)?;
                for (gv, _) in g.as_mut_slice().iter_mut().zip(0..) {
                    total = total + *gv * *gv;
                    *gv = *gv * scale;
                }
                grads.push(Some(g));
            }
            Ok((total / denom, grads))
        }
        (LossKind::CrossEntropy { label_smooth }, Targets::Labels(labels)) => {
            let logits = outputs.last().unwrap();
            let value = loss_ce_smoothed(logits, labels, label_smooth)?;
            let (batch, classes) = logits.shape();
            let mut g = logits.row_softmax();
            let eps = lit::<T>(label_smooth);
            let uniform = eps / lit::<T>(classes as f64);
            let confident = T::one() - eps;
            let inv_batch = T::one() / lit::<T>(batch as f64);
            for b in 0..batch {
                for k in 0..classes {
                    let q = if k == labels[b] { confident + uniform } else { uniform };
                    g[(b, k)] = (g[(b, k)] - q) * inv_batch;
                }
            }
            let mut grads: Vec<Option<Matrix<T>>> = vec![None; outputs.len() - 1];
            grads.push(Some(g));
            Ok((value, grads))
        }
        (LossKind::Mse, Targets::Labels(_)) => Err(Error::Config(
            "mse loss requires per-step targets, got class labels".into(),
        )),
        (LossKind::CrossEntropy { .. }, Targets::Steps(_)) => Err(Error::Config(
            "cross_entropy loss requires class labels, got per-step targets".into(),
        )),
    }
}
