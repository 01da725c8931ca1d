//! Hidden-state scatters: run a model over a dataset and project every
//! visited hidden state onto its first two principal components.

use crate::data::{Label, LabeledSequenceSet};
use crate::error::{Error, Result};
use crate::linalg::{pca_project, Matrix};
use crate::nets::{forward, CellParams};
use crate::scalar::Scalar;

/// A 2-D projection of hidden states, one point per visited state.
///
/// Points inherit the class label of the sequence that produced them
/// (`None` for regression data), so scatter files can be colored per
/// class.
#[derive(Debug, Clone)]
pub struct ScatterPlot<T> {
    points: Matrix<T>,
    labels: Vec<Option<usize>>,
    explained: Vec<T>,
}

impl<T: Scalar> ScatterPlot<T> {
    /// Projected coordinates, one row `(pc1, pc2)` per state.
    pub fn points(&self) -> &Matrix<T> {
        &self.points
    }

    /// Per-point class labels (`None` for regression sequences).
    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    /// Variance captured by each of the two principal components.
    pub fn explained_variances(&self) -> &[T] {
        &self.explained
    }

    /// Number of projected states.
    pub fn len(&self) -> usize {
        self.points.rows()
    }

    /// True when no states were projected (never the case for plots
    /// built by [`hidden_scatter`]).
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// CSV rendering with header `pc1,pc2,label`; regression points get
    /// `-` in the label column.
    pub fn csv(&self) -> String {
        let mut out = String::from("pc1,pc2,label\n");
        for (i, label) in self.labels.iter().enumerate() {
            let pc1 = self.points[(i, 0)].to_f64_lossy();
            let pc2 = self.points[(i, 1)].to_f64_lossy();
            match label {
                Some(c) => out.push_str(&format!("{pc1:.12},{pc2:.12},{c}\n")),
                None => out.push_str(&format!("{pc1:.12},{pc2:.12},-\n")),
            }
        }
        out
    }
}

/// Collect the hidden states a model visits on up to `sample_cap`
/// sequences of `dataset` (in dataset order) and project them onto the
/// first two principal components. Every timestep of every sampled
/// sequence contributes one point; for gated cells the hidden state
/// `h` is used, never the cell state.
pub fn hidden_scatter<T: Scalar>(
    model: &CellParams<T>,
    dataset: &LabeledSequenceSet<T>,
    sample_cap: usize,
) -> Result<ScatterPlot<T>> {
    if sample_cap == 0 {
        return Err(Error::Config("scatter sample cap must be at least 1".into()));
    }
    let samples = dataset.sequences();
    let take = sample_cap.min(samples.len());
    let hidden = model.hidden_size();
    let total: usize = samples[..take].iter().map(|s| s.steps.rows()).sum();

    let mut states = Matrix::<T>::zeros(total, hidden);
    let mut labels = Vec::with_capacity(total);
    let mut row = 0;
    for sample in &samples[..take] {
        let steps: Vec<Matrix<T>> = (0..sample.steps.rows())
            .map(|t| {
                Matrix::from_vec(1, sample.steps.cols(), sample.steps.row(t).to_vec())
                    .expect("row slice has the declared width")
            })
            .collect();
        let record = forward(model, &steps, None)?;
        let label = match &sample.label {
            Label::Class(c) => Some(*c),
            Label::Targets(_) => None,
        };
        for h in record.hidden() {
            for j in 0..hidden {
                states[(row, j)] = h[(0, j)];
            }
            labels.push(label);
            row += 1;
        }
    }

    let (points, explained) = pca_project(&states, 2)?;
    Ok(ScatterPlot {
        points,
        labels,
        explained,
    })
}
