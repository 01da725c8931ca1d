//! Desk-scale datasets: Tomita grammar strings, Mackey-Glass series,
//! and scanline MNIST, all funneled into one labeled-sequence container.

mod mackey;
mod mnist;
mod tomita;

pub use mackey::{mackey_glass, mackey_glass_series, MackeyParams};
pub use mnist::{load_mnist_idx, mnist_from_bytes, mnist_idx_bytes, save_mnist_idx};
pub use tomita::{tomita_dataset, tomita_membership, GrammarId};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// What kind of supervision a dataset carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Binary accept/reject classification (classes {0, 1}).
    BinaryAccept,
    /// Per-timestep real-valued targets.
    Regression,
    /// Ten-way classification (classes 0..=9).
    TenClass,
}

impl Task {
    /// Number of classes, or `None` for regression.
    pub fn class_count(&self) -> Option<usize> {
        match self {
            Task::BinaryAccept => Some(2),
            Task::Regression => None,
            Task::TenClass => Some(10),
        }
    }

    /// Stable lowercase identifier used in configs and metadata.
    pub fn name(&self) -> &'static str {
        match self {
            Task::BinaryAccept => "binary_accept",
            Task::Regression => "regression",
            Task::TenClass => "ten_class",
        }
    }
}

/// Supervision attached to one sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum Label<T> {
    /// A class index (classification tasks).
    Class(usize),
    /// Per-timestep targets, one row per step (regression tasks).
    Targets(Matrix<T>),
}

/// One input sequence with its label: `steps` holds one timestep per
/// row.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSample<T> {
    pub steps: Matrix<T>,
    pub label: Label<T>,
}

impl<T: Scalar> SequenceSample<T> {
    /// Sequence length in timesteps.
    pub fn len(&self) -> usize {
        self.steps.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.rows() == 0
    }
}

/// A non-empty collection of labeled sequences sharing one task and
/// input dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSequenceSet<T> {
    task: Task,
    sequences: Vec<SequenceSample<T>>,
}

impl<T: Scalar> LabeledSequenceSet<T> {
    /// Validate and wrap a sequence collection.
    ///
    /// Rejects empty sets, zero-length sequences, input-dimension
    /// disagreements, class labels outside the task's range, regression
    /// targets whose step count differs from the inputs, and label
    /// kinds that do not match the task.
    pub fn new(task: Task, sequences: Vec<SequenceSample<T>>) -> Result<LabeledSequenceSet<T>> {
        if sequences.is_empty() {
            return Err(Error::dim("sequence_set", "empty dataset"));
        }
        let input_dim = sequences[0].steps.cols();
        for (i, s) in sequences.iter().enumerate() {
            if s.steps.rows() == 0 {
                return Err(Error::dim(
                    "sequence_set",
                    format!("sequence {i} has zero timesteps"),
                ));
            }
            if s.steps.cols() != input_dim {
                return Err(Error::dim(
                    "sequence_set",
                    format!(
                        "sequence {i} has input dimension {}, expected {input_dim}",
                        s.steps.cols()
                    ),
                ));
            }
            s.steps.ensure_finite("sequence_set")?;
            match (&s.label, task.class_count()) {
                (Label::Class(c), Some(k)) => {
                    if *c >= k {
                        return Err(Error::dim(
                            "sequence_set",
                            format!("sequence {i} has class {c}, task {} allows 0..{k}", task.name()),
                        ));
                    }
                }
                (Label::Targets(m), None) => {
                    if m.rows() != s.steps.rows() {
                        return Err(Error::dim(
                            "sequence_set",
                            format!(
                                "sequence {i} has {} target rows for {} steps",
                                m.rows(),
                                s.steps.rows()
                            ),
                        ));
                    }
                    m.ensure_finite("sequence_set")?;
                }
                (Label::Class(_), None) => {
                    return Err(Error::dim(
                        "sequence_set",
                        format!("sequence {i} carries a class label on a regression task"),
                    ));
                }
                (Label::Targets(_), Some(_)) => {
                    return Err(Error::dim(
                        "sequence_set",
                        format!("sequence {i} carries step targets on a classification task"),
                    ));
                }
            }
        }
        Ok(LabeledSequenceSet { task, sequences })
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn sequences(&self) -> &[SequenceSample<T>] {
        &self.sequences
    }

    /// Number of sequences.
    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// Input dimension shared by every sequence.
    pub fn input_dim(&self) -> usize {
        self.sequences[0].steps.cols()
    }

    /// Target dimension: class count for classification, target columns
    /// for regression.
    pub fn target_dim(&self) -> usize {
        match (&self.sequences[0].label, self.task.class_count()) {
            (_, Some(k)) => k,
            (Label::Targets(m), None) => m.cols(),
            (Label::Class(_), None) => unreachable!("validated at construction"),
        }
    }

    /// A subset containing only the given indices, re-validated.
    pub fn subset(&self, indices: &[usize]) -> Result<LabeledSequenceSet<T>> {
        let mut picked = Vec::with_capacity(indices.len());
        for &i in indices {
            let s = self.sequences.get(i).ok_or_else(|| {
                Error::dim(
                    "sequence_set",
                    format!("subset index {i} out of range for {} sequences", self.len()),
                )
            })?;
            picked.push(s.clone());
        }
        LabeledSequenceSet::new(self.task, picked)
    }

    /// Inspection CSV: `index,label,len`, one row per sequence
    /// (regression labels print as `-`).
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("index,label,len\n");
        for (i, s) in self.sequences.iter().enumerate() {
            let label = match &s.label {
                Label::Class(c) => c.to_string(),
                Label::Targets(_) => "-".to_string(),
            };
            out.push_str(&format!("{i},{label},{}\n", s.len()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class_sample(len: usize, dim: usize, class: usize) -> SequenceSample<f64> {
        SequenceSample {
            steps: Matrix::zeros(len, dim),
            label: Label::Class(class),
        }
    }

    #[test]
    fn construction_validates_labels_and_shapes() {
        assert!(LabeledSequenceSet::<f64>::new(Task::BinaryAccept, vec![]).is_err());
        assert!(LabeledSequenceSet::new(Task::BinaryAccept, vec![class_sample(3, 2, 2)]).is_err());
        assert!(LabeledSequenceSet::new(Task::TenClass, vec![class_sample(3, 2, 9)]).is_ok());
        assert!(LabeledSequenceSet::new(
            Task::BinaryAccept,
            vec![class_sample(3, 2, 0), class_sample(2, 5, 1)]
        )
        .is_err());
        assert!(LabeledSequenceSet::new(Task::BinaryAccept, vec![class_sample(0, 2, 0)]).is_err());
        // Label kind must match the task.
        assert!(LabeledSequenceSet::new(Task::Regression, vec![class_sample(3, 2, 0)]).is_err());
        let reg = SequenceSample {
            steps: Matrix::<f64>::zeros(3, 2),
            label: Label::Targets(Matrix::zeros(3, 1)),
        };
        assert!(LabeledSequenceSet::new(Task::Regression, vec![reg.clone()]).is_ok());
        assert!(LabeledSequenceSet::new(Task::BinaryAccept, vec![reg]).is_err());
        let ragged = SequenceSample {
            steps: Matrix::<f64>::zeros(3, 2),
            label: Label::Targets(Matrix::zeros(2, 1)),
        };
        assert!(LabeledSequenceSet::new(Task::Regression, vec![ragged]).is_err());
    }

    #[test]
    fn summary_csv_lists_every_sequence() {
        let set = LabeledSequenceSet::new(
            Task::BinaryAccept,
            vec![class_sample(3, 2, 1), class_sample(5, 2, 0)],
        )
        .unwrap();
        assert_eq!(set.summary_csv(), "index,label,len\n0,1,3\n1,0,5\n");
        assert_eq!(set.input_dim(), 2);
        assert_eq!(set.target_dim(), 2);
    }

    #[test]
    fn subset_picks_by_index_and_checks_bounds() {
        let set = LabeledSequenceSet::new(
            Task::BinaryAccept,
            vec![class_sample(3, 2, 1), class_sample(5, 2, 0), class_sample(4, 2, 1)],
        )
        .unwrap();
        let sub = set.subset(&[2, 0]).unwrap();
        assert_eq!(sub.len(), 2);
        assert_eq!(sub.sequences()[0].len(), 4);
        assert!(set.subset(&[3]).is_err());
    }
}
