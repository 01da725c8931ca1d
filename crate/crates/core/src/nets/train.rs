//! Reproducible mini-batch training with spectrum bookkeeping.
//!
//! `train` runs epochs of BPTT + Adam over a labeled sequence set and
//! returns an [`ExperimentReport`]: per-epoch training loss (plus
//! accuracy for classification tasks) and eigenvalue snapshots of every
//! recurrent block at scheduled epochs. Every batch order, and therefore
//! every float in the report, is a pure function of the config seed.
//!
//! Sequences of unequal length are grouped into same-length buckets
//! after each epoch's shuffle and batched within their bucket, so no
//! padding is ever injected. Divergence is not rescued: gradients are
//! applied as computed, and a non-finite loss or activation aborts the
//! run with the epoch and batch named.

use std::collections::{BTreeMap, BTreeSet};

use crate::analysis::{recurrent_spectrum, SpectrumSnapshot};
use crate::data::{Label, LabeledSequenceSet};
use crate::error::{Error, Result};
use crate::initializers::InitializerKind;
use crate::linalg::{Matrix, Rng};
use crate::scalar::Scalar;

use super::adam::{adam_step, AdamConfig, AdamState};
use super::cell::{backward_with_outputs, forward, CellParams};
use super::loss::{loss_grads, LossKind, Targets};

/// Everything that defines one training run.
///
/// The initializer fields record how the model's recurrent and input
/// blocks were (or should be) drawn; pipeline front-ends use them to
/// build the model and log provenance. [`train`] itself receives the
/// model already initialized and does not reapply them.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub adam: AdamConfig,
    pub epochs: usize,
    pub batch_size: usize,
    pub loss: LossKind,
    pub seed: u64,
    pub recurrent_init: InitializerKind,
    pub input_init: InitializerKind,
    /// Epochs at which to snapshot the recurrent spectra (0 = before
    /// any update). `None` means start, middle, and end.
    pub snapshot_epochs: Option<Vec<usize>>,
}

impl TrainConfig {
    /// A run with standard Adam constants (lr 1e-3), batch size 32, and
    /// default-uniform initializers.
    pub fn new(loss: LossKind, epochs: usize, seed: u64) -> TrainConfig {
        TrainConfig {
            adam: AdamConfig::with_learning_rate(1e-3),
            epochs,
            batch_size: 32,
            loss,
            seed,
            recurrent_init: InitializerKind::DefaultUniform,
            input_init: InitializerKind::DefaultUniform,
            snapshot_epochs: None,
        }
    }

    /// The resolved, sorted, deduplicated snapshot epochs.
    ///
    /// Defaults to `{0, epochs/2, epochs}`. Epochs beyond the run are
    /// rejected.
    pub fn snapshot_schedule(&self) -> Result<Vec<usize>> {
        let raw = match &self.snapshot_epochs {
            Some(list) => list.clone(),
            None => vec![0, self.epochs / 2, self.epochs],
        };
        let set: BTreeSet<usize> = raw.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&e| e > self.epochs) {
            return Err(Error::Config(format!(
                "snapshot epoch {bad} is beyond the run's {} epochs",
                self.epochs
            )));
        }
        Ok(set.into_iter().collect())
    }

    /// Check hyperparameter ranges and the snapshot schedule.
    pub fn validate(&self) -> Result<()> {
        self.adam.validate()?;
        self.loss.validate()?;
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        self.snapshot_schedule()?;
        Ok(())
    }
}

/// What one training run produced.
#[derive(Debug, Clone)]
pub struct ExperimentReport<T> {
    losses: Vec<f64>,
    accuracies: Option<Vec<f64>>,
    snapshots: Vec<SpectrumSnapshot<T>>,
}

impl<T: Scalar> ExperimentReport<T> {
    /// Per-epoch training loss: the sample-weighted mean of that
    /// epoch's mini-batch losses.
    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    /// Per-epoch training accuracy, present for classification tasks.
    pub fn accuracies(&self) -> Option<&[f64]> {
        self.accuracies.as_deref()
    }

    /// Recurrent-spectrum snapshots in epoch order.
    pub fn snapshots(&self) -> &[SpectrumSnapshot<T>] {
        &self.snapshots
    }

    /// Loss after the last epoch, if any epoch ran.
    pub fn final_loss(&self) -> Option<f64> {
        self.losses.last().copied()
    }

    /// Training curve as CSV: `epoch,loss,accuracy` with epochs counted
    /// from 1 and `-` in the accuracy column for regression runs.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("epoch,loss,accuracy\n");
        for (i, loss) in self.losses.iter().enumerate() {
            match self.accuracies.as_ref().map(|a| a[i]) {
                Some(acc) => {
                    out.push_str(&format!("{},{:.12},{:.12}\n", i + 1, loss, acc));
                }
                None => out.push_str(&format!("{},{:.12},-\n", i + 1, loss)),
            }
        }
        out
    }

    /// All snapshots as CSV: `epoch,block,rank,modulus`.
    pub fn spectrum_csv(&self) -> String {
        let mut out = String::from("epoch,block,rank,modulus\n");
        for snap in &self.snapshots {
            snap.write_csv_rows(&mut out);
        }
        out
    }
}

/// Run `config.epochs` of mini-batch BPTT + Adam on `model`.
///
/// Each epoch shuffles the dataset with the experiment RNG, buckets the
/// shuffled order by sequence length, and walks same-length batches of
/// up to `batch_size` sequences. The report carries the per-epoch loss
/// curve, accuracy for classification tasks, and spectra at the
/// scheduled epochs. Numeric failures abort with the epoch and batch in
/// the message; nothing is clipped or retried.
pub fn train<T: Scalar>(
    model: &mut CellParams<T>,
    dataset: &LabeledSequenceSet<T>,
    config: &TrainConfig,
) -> Result<ExperimentReport<T>> {
    config.validate()?;
    model.validate()?;
    check_compat(model, dataset, config.loss)?;
    let schedule = config.snapshot_schedule()?;
    let classification = dataset.task().class_count().is_some();

    let mut rng = Rng::new(config.seed);
    let mut adam = AdamState::new(model);
    let mut losses = Vec::with_capacity(config.epochs);
    let mut accuracies = classification.then(|| Vec::with_capacity(config.epochs));
    let mut snapshots = Vec::with_capacity(schedule.len());
    if schedule.first() == Some(&0) {
        snapshots.push(recurrent_spectrum(model, 0)?);
    }

    let mut order: Vec<usize> = (0..dataset.len()).collect();
    for epoch in 1..=config.epochs {
        rng.shuffle(&mut order);
        let batches = length_bucketed_batches(dataset, &order, config.batch_size);
        let mut loss_sum = 0.0;
        let mut seen = 0usize;
        let mut hits = 0usize;
        for (index, batch) in batches.iter().enumerate() {
            let context = |e| with_context(epoch, index + 1, e);
            let (steps, targets) = assemble_batch(dataset, batch).map_err(context)?;
            let (loss_value, grads, last) =
                backward_with_outputs(model, &steps, &targets.borrow(), config.loss)
                    .map_err(context)?;
            let loss_value = loss_value.to_f64_lossy();
            if !loss_value.is_finite() {
                return Err(context(Error::non_finite("train", "loss overflowed")));
            }
            adam_step(model, &grads, &mut adam, &config.adam).map_err(context)?;
            loss_sum += loss_value * batch.len() as f64;
            seen += batch.len();
            if let BatchTargets::Labels(labels) = &targets {
                hits += count_argmax_hits(&last, labels);
            }
        }
        losses.push(loss_sum / seen as f64);
        if let Some(accs) = accuracies.as_mut() {
            accs.push(hits as f64 / seen as f64);
        }
        if schedule.binary_search(&epoch).is_ok() {
            snapshots.push(recurrent_spectrum(model, epoch)?);
        }
    }

    Ok(ExperimentReport {
        losses,
        accuracies,
        snapshots,
    })
}

/// Mean loss — and accuracy, for classification tasks — over a dataset
/// without touching the weights.
///
/// Uses the same length-bucketed batching and sample-weighted averaging
/// as [`train`], but walks the dataset in its stored order.
pub fn evaluate<T: Scalar>(
    model: &CellParams<T>,
    dataset: &LabeledSequenceSet<T>,
    loss: LossKind,
    batch_size: usize,
) -> Result<(f64, Option<f64>)> {
    loss.validate()?;
    model.validate()?;
    if batch_size == 0 {
        return Err(Error::Config("batch_size must be at least 1".into()));
    }
    check_compat(model, dataset, loss)?;
    let classification = dataset.task().class_count().is_some();

    let order: Vec<usize> = (0..dataset.len()).collect();
    let mut loss_sum = 0.0;
    let mut seen = 0usize;
    let mut hits = 0usize;
    for batch in length_bucketed_batches(dataset, &order, batch_size) {
        let (steps, targets) = assemble_batch(dataset, &batch)?;
        let record = forward(model, &steps, None)?;
        let (value, _) = loss_grads(record.step_outputs(), &targets.borrow(), loss)?;
        loss_sum += value.to_f64_lossy() * batch.len() as f64;
        seen += batch.len();
        if let BatchTargets::Labels(labels) = &targets {
            let last = record.step_outputs().last().expect("non-empty sequence");
            hits += count_argmax_hits(last, labels);
        }
    }
    let mean = loss_sum / seen as f64;
    Ok((mean, classification.then(|| hits as f64 / seen as f64)))
}

/// Owned supervision for one assembled batch.
enum BatchTargets<T> {
    Steps(Vec<Matrix<T>>),
    Labels(Vec<usize>),
}

impl<T: Scalar> BatchTargets<T> {
    fn borrow(&self) -> Targets<'_, T> {
        match self {
            BatchTargets::Steps(m) => Targets::Steps(m),
            BatchTargets::Labels(l) => Targets::Labels(l),
        }
    }
}

/// Group `order` into same-length runs of at most `batch_size`,
/// visiting buckets by ascending length and keeping the shuffled order
/// inside each bucket.
fn length_bucketed_batches<T: Scalar>(
    dataset: &LabeledSequenceSet<T>,
    order: &[usize],
    batch_size: usize,
) -> Vec<Vec<usize>> {
    let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in order {
        buckets
            .entry(dataset.sequences()[i].len())
            .or_default()
            .push(i);
    }
    let mut batches = Vec::new();
    for bucket in buckets.into_values() {
        for chunk in bucket.chunks(batch_size) {
            batches.push(chunk.to_vec());
        }
    }
    batches
}

/// Stack the chosen sequences (all one length) into per-step B×input
/// matrices plus their supervision.
fn assemble_batch<T: Scalar>(
    dataset: &LabeledSequenceSet<T>,
    batch: &[usize],
) -> Result<(Vec<Matrix<T>>, BatchTargets<T>)> {
    let seqs = dataset.sequences();
    let len = seqs[batch[0]].len();
    let dim = dataset.input_dim();
    let rows = batch.len();

    let mut steps = Vec::with_capacity(len);
    for t in 0..len {
        let mut data = Vec::with_capacity(rows * dim);
        for &i in batch {
            data.extend_from_slice(seqs[i].steps.row(t));
        }
        steps.push(Matrix::from_vec(rows, dim, data)?);
    }

    let targets = if dataset.task().class_count().is_some() {
        let mut labels = Vec::with_capacity(rows);
        for &i in batch {
            match &seqs[i].label {
                Label::Class(c) => labels.push(*c),
                Label::Targets(_) => {
                    return Err(Error::dim(
                        "train",
                        format!("sequence {i} carries step targets on a classification task"),
                    ))
                }
            }
        }
        BatchTargets::Labels(labels)
    } else {
        let out = dataset.target_dim();
        let mut per_step = Vec::with_capacity(len);
        for t in 0..len {
            let mut data = Vec::with_capacity(rows * out);
            for &i in batch {
                match &seqs[i].label {
                    Label::Targets(m) => data.extend_from_slice(m.row(t)),
                    Label::Class(_) => {
                        return Err(Error::dim(
                            "train",
                            format!("sequence {i} carries a class label on a regression task"),
                        ))
                    }
                }
            }
            per_step.push(Matrix::from_vec(rows, out, data)?);
        }
        BatchTargets::Steps(per_step)
    };
    Ok((steps, targets))
}

/// Reject model/dataset/loss combinations that cannot train.
fn check_compat<T: Scalar>(
    model: &CellParams<T>,
    dataset: &LabeledSequenceSet<T>,
    loss: LossKind,
) -> Result<()> {
    if dataset.input_dim() != model.input_size() {
        return Err(Error::dim(
            "train",
            format!(
                "dataset inputs have dimension {}, model expects {}",
                dataset.input_dim(),
                model.input_size()
            ),
        ));
    }
    match (dataset.task().class_count(), loss) {
        (Some(classes), LossKind::CrossEntropy { .. }) => {
            if model.output_size() != classes {
                return Err(Error::dim(
                    "train",
                    format!(
                        "model has {} outputs for a {classes}-class task",
                        model.output_size()
                    ),
                ));
            }
        }
        (None, LossKind::Mse) => {
            if model.output_size() != dataset.target_dim() {
                return Err(Error::dim(
                    "train",
                    format!(
                        "model has {} outputs, regression targets have dimension {}",
                        model.output_size(),
                        dataset.target_dim()
                    ),
                ));
            }
        }
        (Some(_), LossKind::Mse) => {
            return Err(Error::Config(
                "mse cannot train a classification dataset; use cross_entropy".into(),
            ))
        }
        (None, LossKind::CrossEntropy { .. }) => {
            return Err(Error::Config(
                "cross_entropy cannot train a regression dataset; use mse".into(),
            ))
        }
    }
    Ok(())
}

/// Prefix numeric failures with where in the run they happened.
fn with_context(epoch: usize, batch: usize, err: Error) -> Error {
    let tag = format!("epoch {epoch}, batch {batch}: ");
    match err {
        Error::Dimension { op, details } => Error::Dimension {
            op,
            details: format!("{tag}{details}"),
        },
        Error::NonFinite { op, details } => Error::NonFinite {
            op,
            details: format!("{tag}{details}"),
        },
        Error::Convergence { op, details } => Error::Convergence {
            op,
            details: format!("{tag}{details}"),
        },
        Error::Config(d) => Error::Config(format!("{tag}{d}")),
        Error::Decomposition(d) => Error::Decomposition(format!("{tag}{d}")),
        other => other,
    }
}

/// Rows of `outputs` whose argmax column equals the label. Ties go to
/// the lowest column index.
fn count_argmax_hits<T: Scalar>(outputs: &Matrix<T>, labels: &[usize]) -> usize {
    let (rows, cols) = outputs.shape();
    let mut hits = 0;
    for (r, &label) in labels.iter().enumerate().take(rows) {
        let mut best = 0;
        for c in 1..cols {
            if outputs[(r, c)] > outputs[(r, best)] {
                best = c;
            }
        }
        if best == label {
            hits += 1;
        }
    }
    hits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{tomita_dataset, GrammarId, SequenceSample, Task};
    use crate::nets::CellKind;

    fn tomita4(max_len: usize, per_class: usize, seed: u64) -> LabeledSequenceSet<f64> {
        let mut rng = Rng::new(seed);
        tomita_dataset(GrammarId::new(4).unwrap(), max_len, per_class, &mut rng).unwrap()
    }

    fn ce() -> LossKind {
        LossKind::CrossEntropy { label_smooth: 0.0 }
    }

    #[test]
    fn zero_epochs_reports_only_the_initial_spectrum() {
        let mut rng = Rng::new(5);
        let mut model = CellParams::<f64>::init(
            CellKind::TanhRnn,
            2,
            4,
            2,
            InitializerKind::Eigen { lambda: 0.95 },
            InitializerKind::DefaultUniform,
            &mut rng,
        )
        .unwrap();
        let before = model.clone();
        let data = tomita4(6, 5, 9);
        let config = TrainConfig::new(ce(), 0, 1);
        let report = train(&mut model, &data, &config).unwrap();

        assert!(report.losses().is_empty());
        assert_eq!(report.accuracies().map(<[f64]>::len), Some(0));
        assert_eq!(report.final_loss(), None);
        assert_eq!(report.snapshots().len(), 1);
        assert_eq!(report.snapshots()[0].epoch(), 0);
        let radius = report.snapshots()[0].max_modulus();
        assert!((radius - 0.95).abs() < 1e-9, "radius {radius}");
        assert_eq!(model, before, "no epoch ran, so no update may land");
        assert_eq!(report.curve_csv(), "epoch,loss,accuracy\n");
    }

    // Oracle: with one timestep from h0 = 0, a linear cell computes
    // y = W_y·(W_x·x + b) + b_y — an affine map of x. The best
    // reachable loss is therefore the plain least-squares optimum,
    // found here by solving the 3×3 normal equations directly.
    #[test]
    fn a_linear_cell_reaches_the_least_squares_optimum() {
        let mut rng = Rng::new(42);
        let n = 12usize;
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let x = [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
            let y = 0.7 * x[0] - 0.3 * x[1] + 0.2 + 0.05 * rng.normal::<f64>();
            xs.push(x);
            ys.push(y);
        }

        // Normal equations for features (x1, x2, 1).
        let feats: Vec<[f64; 3]> = xs.iter().map(|x| [x[0], x[1], 1.0]).collect();
        let mut ata = [[0.0f64; 3]; 3];
        let mut atb = [0.0f64; 3];
        for (f, &y) in feats.iter().zip(&ys) {
            for r in 0..3 {
                for c in 0..3 {
                    ata[r][c] += f[r] * f[c];
                }
                atb[r] += f[r] * y;
            }
        }
        let beta = solve3(ata, atb);
        let optimum = feats
            .iter()
            .zip(&ys)
            .map(|(f, &y)| {
                let p = f[0] * beta[0] + f[1] * beta[1] + f[2] * beta[2];
                (p - y) * (p - y)
            })
            .sum::<f64>()
            / n as f64;

        let sequences = xs
            .iter()
            .zip(&ys)
            .map(|(x, &y)| SequenceSample {
                steps: Matrix::from_vec(1, 2, x.to_vec()).unwrap(),
                label: Label::Targets(Matrix::from_vec(1, 1, vec![y]).unwrap()),
            })
            .collect();
        let data = LabeledSequenceSet::new(Task::Regression, sequences).unwrap();

        let mut model = CellParams::<f64>::init(
            CellKind::LinearRnn,
            2,
            3,
            1,
            InitializerKind::DefaultUniform,
            InitializerKind::DefaultUniform,
            &mut rng,
        )
        .unwrap();
        // Full-batch gradients make the descent exact, so the only gap
        // left at the end is optimization error, not mini-batch noise.
        let mut config = TrainConfig::new(LossKind::Mse, 3000, 7);
        config.adam = AdamConfig::with_learning_rate(0.02);
        config.batch_size = n;
        let report = train(&mut model, &data, &config).unwrap();
        assert_eq!(report.losses().len(), 3000);

        let (last, acc) = evaluate(&model, &data, LossKind::Mse, n).unwrap();
        assert_eq!(acc, None);
        assert!(
            last >= optimum - 1e-9,
            "an affine model cannot beat least squares: {last} vs {optimum}"
        );
        assert!(
            last - optimum < 1e-4,
            "final loss {last} should be within 1e-4 of the optimum {optimum}"
        );
    }

    #[test]
    fn the_same_seed_trains_bitwise_identically() {
        let data = tomita4(8, 12, 33);
        let mut rng = Rng::new(2);
        let init = CellParams::<f64>::init(
            CellKind::Gru,
            2,
            6,
            2,
            InitializerKind::Eigen { lambda: 0.9 },
            InitializerKind::XavierUniform,
            &mut rng,
        )
        .unwrap();
        let mut config = TrainConfig::new(ce(), 3, 77);
        config.batch_size = 8;

        let mut first = init.clone();
        let mut second = init.clone();
        let report_a = train(&mut first, &data, &config).unwrap();
        let report_b = train(&mut second, &data, &config).unwrap();

        assert_eq!(report_a.losses(), report_b.losses());
        assert_eq!(report_a.accuracies(), report_b.accuracies());
        assert_eq!(first, second);
        assert_eq!(report_a.spectrum_csv(), report_b.spectrum_csv());
        assert_eq!(report_a.curve_csv(), report_b.curve_csv());
    }

    #[test]
    fn tomita_training_loss_trends_downward() {
        let data = tomita4(8, 30, 61);
        let mut rng = Rng::new(3);
        let mut model = CellParams::<f64>::init(
            CellKind::TanhRnn,
            2,
            8,
            2,
            InitializerKind::Eigen { lambda: 0.95 },
            InitializerKind::XavierUniform,
            &mut rng,
        )
        .unwrap();
        let mut config = TrainConfig::new(ce(), 30, 5);
        config.adam = AdamConfig::with_learning_rate(5e-3);
        config.batch_size = 16;
        let report = train(&mut model, &data, &config).unwrap();

        let losses = report.losses();
        assert_eq!(losses.len(), 30);
        let head: f64 = losses[..5].iter().sum::<f64>() / 5.0;
        let tail: f64 = losses[25..].iter().sum::<f64>() / 5.0;
        assert!(tail < head, "loss should trend down: head {head}, tail {tail}");

        let accs = report.accuracies().unwrap();
        assert_eq!(accs.len(), 30);
        assert!(accs.iter().all(|a| (0.0..=1.0).contains(a)));
        assert!(accs[29] > accs[0], "accuracy should improve on this seed");
    }

    #[test]
    fn batches_group_sequences_by_length() {
        let mut rng = Rng::new(17);
        let data = tomita4(6, 20, 29);
        let mut order: Vec<usize> = (0..data.len()).collect();
        rng.shuffle(&mut order);

        let batches = length_bucketed_batches(&data, &order, 7);
        let mut covered: Vec<usize> = Vec::new();
        let mut last_len = 0usize;
        for batch in &batches {
            assert!(!batch.is_empty() && batch.len() <= 7);
            let len = data.sequences()[batch[0]].len();
            assert!(
                batch.iter().all(|&i| data.sequences()[i].len() == len),
                "mixed lengths in one batch"
            );
            assert!(len >= last_len, "buckets should come in ascending length");
            last_len = len;
            covered.extend_from_slice(batch);
        }
        covered.sort_unstable();
        let expected: Vec<usize> = (0..data.len()).collect();
        assert_eq!(covered, expected, "every sequence exactly once");
    }

    #[test]
    fn snapshot_schedule_defaults_to_start_middle_end() {
        let config = TrainConfig::new(ce(), 4, 0);
        assert_eq!(config.snapshot_schedule().unwrap(), vec![0, 2, 4]);

        let zero = TrainConfig::new(ce(), 0, 0);
        assert_eq!(zero.snapshot_schedule().unwrap(), vec![0]);

        let mut custom = TrainConfig::new(ce(), 4, 0);
        custom.snapshot_epochs = Some(vec![1, 1, 0]);
        assert_eq!(custom.snapshot_schedule().unwrap(), vec![0, 1]);

        let data = tomita4(5, 4, 1);
        let mut rng = Rng::new(8);
        let mut model = CellParams::<f64>::init(
            CellKind::TanhRnn,
            2,
            3,
            2,
            InitializerKind::DefaultUniform,
            InitializerKind::DefaultUniform,
            &mut rng,
        )
        .unwrap();
        let report = train(&mut model, &data, &config).unwrap();
        let epochs: Vec<usize> = report.snapshots().iter().map(|s| s.epoch()).collect();
        assert_eq!(epochs, vec![0, 2, 4]);
        let csv = report.spectrum_csv();
        assert!(csv.starts_with("epoch,block,rank,modulus\n"));
        assert_eq!(csv.lines().count(), 1 + 3 * 3, "three snapshots of rank 3");
    }

    #[test]
    fn config_and_dataset_mismatches_are_rejected() {
        let data = tomita4(5, 3, 4);
        let mut rng = Rng::new(1);
        let mut model = CellParams::<f64>::init(
            CellKind::TanhRnn,
            2,
            3,
            2,
            InitializerKind::DefaultUniform,
            InitializerKind::DefaultUniform,
            &mut rng,
        )
        .unwrap();

        let mut zero_batch = TrainConfig::new(ce(), 1, 0);
        zero_batch.batch_size = 0;
        let err = train(&mut model, &data, &zero_batch).unwrap_err();
        assert!(err.to_string().contains("batch_size"), "{err}");

        let mut late_snapshot = TrainConfig::new(ce(), 2, 0);
        late_snapshot.snapshot_epochs = Some(vec![5]);
        let err = train(&mut model, &data, &late_snapshot).unwrap_err();
        assert!(err.to_string().contains("snapshot epoch 5"), "{err}");

        let err = train(&mut model, &data, &TrainConfig::new(LossKind::Mse, 1, 0)).unwrap_err();
        assert!(err.to_string().contains("cross_entropy"), "{err}");

        let series = crate::data::mackey_glass::<f64>(30, &crate::data::MackeyParams::default(), 50)
            .unwrap();
        let mut reg_model = CellParams::<f64>::init(
            CellKind::TanhRnn,
            1,
            3,
            1,
            InitializerKind::DefaultUniform,
            InitializerKind::DefaultUniform,
            &mut rng,
        )
        .unwrap();
        let err = train(&mut reg_model, &series, &TrainConfig::new(ce(), 1, 0)).unwrap_err();
        assert!(err.to_string().contains("regression"), "{err}");

        let err = train(&mut reg_model, &data, &TrainConfig::new(ce(), 1, 0)).unwrap_err();
        assert!(err.to_string().contains("dimension"), "{err}");

        let mut wide = CellParams::<f64>::init(
            CellKind::TanhRnn,
            2,
            3,
            5,
            InitializerKind::DefaultUniform,
            InitializerKind::DefaultUniform,
            &mut rng,
        )
        .unwrap();
        let err = train(&mut wide, &data, &TrainConfig::new(ce(), 1, 0)).unwrap_err();
        assert!(err.to_string().contains("2-class"), "{err}");
    }

    #[test]
    fn divergence_is_reported_with_epoch_context() {
        let series =
            crate::data::mackey_glass::<f64>(60, &crate::data::MackeyParams::default(), 80)
                .unwrap();
        let mut rng = Rng::new(6);
        let mut model = CellParams::<f64>::init(
            CellKind::LinearRnn,
            1,
            4,
            1,
            InitializerKind::DefaultUniform,
            InitializerKind::DefaultUniform,
            &mut rng,
        )
        .unwrap();
        let mut config = TrainConfig::new(LossKind::Mse, 6, 0);
        config.adam = AdamConfig::with_learning_rate(1e8);
        let err = train(&mut model, &series, &config).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("epoch "), "{text}");
        assert!(matches!(err, Error::NonFinite { .. }), "{text}");
    }

    // Oracle: an all-zero model emits identical logits, so argmax picks
    // class 0 everywhere — exactly half right on a balanced set — and
    // cross-entropy against uniform logits over two classes is ln 2.
    #[test]
    fn evaluate_reports_chance_accuracy_for_a_zero_model() {
        let data = tomita4(6, 10, 44);
        let model = CellParams::<f64>::zeros(CellKind::TanhRnn, 2, 4, 2);
        let (loss, acc) = evaluate(&model, &data, ce(), 8).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12, "loss {loss}");
        assert_eq!(acc, Some(0.5));
    }

    #[test]
    fn evaluate_matches_the_loss_of_a_single_batch() {
        let series =
            crate::data::mackey_glass::<f64>(40, &crate::data::MackeyParams::default(), 60)
                .unwrap();
        let mut rng = Rng::new(13);
        let model = CellParams::<f64>::init(
            CellKind::TanhRnn,
            1,
            5,
            1,
            InitializerKind::Eigen { lambda: 0.9 },
            InitializerKind::XavierUniform,
            &mut rng,
        )
        .unwrap();
        let (loss, acc) = evaluate(&model, &series, LossKind::Mse, 4).unwrap();
        assert_eq!(acc, None);

        // The set holds one sequence, so evaluate saw exactly one batch.
        let (steps, targets) = assemble_batch(&series, &[0]).unwrap();
        let direct = crate::nets::eval_loss(&model, &steps, &targets.borrow(), LossKind::Mse)
            .unwrap();
        assert!((loss - direct).abs() < 1e-15);
    }

    #[test]
    fn forget_bias_applies_only_to_lstm_cells() {
        let mut rng = Rng::new(21);
        let mut lstm = CellParams::<f64>::init(
            CellKind::Lstm,
            2,
            3,
            2,
            InitializerKind::DefaultUniform,
            InitializerKind::DefaultUniform,
            &mut rng,
        )
        .unwrap();
        lstm.set_forget_bias(1.0).unwrap();
        let blocks = lstm.blocks();
        let (_, forget) = blocks
            .iter()
            .find(|(name, _)| name == "b_f")
            .expect("lstm exposes a forget bias block");
        assert!(forget.as_slice().iter().all(|&v| v == 1.0));

        let mut tanh = CellParams::<f64>::zeros(CellKind::TanhRnn, 2, 3, 2);
        let err = tanh.set_forget_bias(1.0).unwrap_err();
        assert!(err.to_string().contains("lstm"), "{err}");
    }

    /// 3×3 linear solve by Gaussian elimination with partial pivoting.
    fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
        for col in 0..3 {
            let pivot = (col..3)
                .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
                .unwrap();
            a.swap(col, pivot);
            b.swap(col, pivot);
            for row in col + 1..3 {
                let f = a[row][col] / a[col][col];
                for k in col..3 {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = [0.0; 3];
        for row in (0..3).rev() {
            let mut s = b[row];
            for k in row + 1..3 {
                s -= a[row][k] * x[k];
            }
            x[row] = s / a[row][row];
        }
        x
    }
}
