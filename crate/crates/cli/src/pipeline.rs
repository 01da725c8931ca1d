//! Experiment orchestration: dataset and model construction plus the
//! per-seed training fanout.

use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use eigenrnn::analysis::{average_curves, CurveBundle};
use eigenrnn::data::{
    load_mnist_idx, mackey_glass, tomita_dataset, LabeledSequenceSet, MackeyParams,
};
use eigenrnn::linalg::Rng;
use eigenrnn::nets::{evaluate, save_checkpoint, train, CellParams};
use eigenrnn::{Error, Result};
use serde_json::json;

use crate::artifacts::{mean_std_csv, RunManifest};
use crate::config::{ExperimentSpec, TaskSpec};

/// Run `f` over `items` on up to `workers` threads, returning results
/// in item order. Worker count never changes the output, only the
/// schedule; errors are surfaced in item order too, so the reported
/// failure is reproducible.
pub fn parallel_map<I, R, F>(workers: usize, items: Vec<I>, f: F) -> Vec<R>
where
    I: Send,
    R: Send,
    F: Fn(usize, I) -> R + Sync,
{
    let total = items.len();
    let workers = workers.max(1).min(total.max(1));
    if workers <= 1 {
        return items.into_iter().enumerate().map(|(i, x)| f(i, x)).collect();
    }
    let queue: Mutex<VecDeque<(usize, I)>> =
        Mutex::new(items.into_iter().enumerate().collect());
    let results: Mutex<Vec<(usize, R)>> = Mutex::new(Vec::with_capacity(total));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let job = queue.lock().expect("job queue poisoned").pop_front();
                let Some((i, item)) = job else { break };
                let r = f(i, item);
                results.lock().expect("result sink poisoned").push((i, r));
            });
        }
    });
    let mut results = results.into_inner().expect("result sink poisoned");
    results.sort_by_key(|(i, _)| *i);
    results.into_iter().map(|(_, r)| r).collect()
}

fn mnist_file(dir: &Path, name: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    if !path.is_file() {
        return Err(Error::Config(format!(
            "mnist file {} does not exist",
            path.display()
        )));
    }
    Ok(path)
}

/// Truncate to the first `cap` sequences; `cap = 0` keeps everything.
fn cap_subset(set: LabeledSequenceSet<f64>, cap: usize) -> Result<LabeledSequenceSet<f64>> {
    if cap == 0 || cap >= set.len() {
        return Ok(set);
    }
    set.subset(&(0..cap).collect::<Vec<_>>())
}

/// Build the training dataset for a task.
pub fn build_dataset(task: &TaskSpec) -> Result<LabeledSequenceSet<f64>> {
    match task {
        TaskSpec::Tomita {
            grammar,
            max_len,
            per_class,
            data_seed,
        } => {
            let mut rng = Rng::new(*data_seed);
            tomita_dataset(*grammar, *max_len, *per_class, &mut rng)
        }
        TaskSpec::Mnist { dir, train_cap, .. } => {
            let images = mnist_file(dir, "train-images-idx3-ubyte")?;
            let labels = mnist_file(dir, "train-labels-idx1-ubyte")?;
            cap_subset(load_mnist_idx(&images, &labels)?, *train_cap)
        }
        TaskSpec::Mackey { length, warmup } => {
            mackey_glass(*length, &MackeyParams::default(), *warmup)
        }
    }
}

/// Build the held-out dataset, for tasks that ship one (mnist only).
pub fn build_test_dataset(task: &TaskSpec) -> Result<Option<LabeledSequenceSet<f64>>> {
    match task {
        TaskSpec::Mnist { dir, test_cap, .. } => {
            let images = mnist_file(dir, "t10k-images-idx3-ubyte")?;
            let labels = mnist_file(dir, "t10k-labels-idx1-ubyte")?;
            Ok(Some(cap_subset(load_mnist_idx(&images, &labels)?, *test_cap)?))
        }
        _ => Ok(None),
    }
}

/// Initialize one model for `seed` and derive the training-stream seed
/// from the same generator, so initialization and shuffling are
/// independent but jointly reproducible.
pub fn build_model(
    spec: &ExperimentSpec,
    dataset: &LabeledSequenceSet<f64>,
    seed: u64,
) -> Result<(CellParams<f64>, u64)> {
    let output = match dataset.task().class_count() {
        Some(classes) => classes,
        None => dataset.target_dim(),
    };
    let mut rng = Rng::new(seed);
    let mut model = CellParams::<f64>::init(
        spec.cell,
        dataset.input_dim(),
        spec.hidden,
        output,
        spec.template.recurrent_init,
        spec.template.input_init,
        &mut rng,
    )?;
    if let Some(bias) = spec.forget_bias {
        model.set_forget_bias(bias)?;
    }
    let train_seed = rng.next_u64();
    Ok((model, train_seed))
}

struct SeedOutcome {
    seed: u64,
    losses: Vec<f64>,
    files: Vec<String>,
    test: Option<(f64, Option<f64>)>,
}

fn run_seed(
    spec: &ExperimentSpec,
    dataset: &LabeledSequenceSet<f64>,
    test_set: Option<&LabeledSequenceSet<f64>>,
    seed: u64,
) -> Result<SeedOutcome> {
    let (mut model, train_seed) = build_model(spec, dataset, seed)?;
    let mut config = spec.template.clone();
    config.seed = train_seed;
    let report = train(&mut model, dataset, &config)
        .map_err(|e| Error::Config(format!("seed {seed}: {e}")))?;

    let mut files = Vec::new();
    let write = |name: String, content: &str| -> Result<String> {
        crate::artifacts::write_text(&spec.out.join(&name), content)?;
        Ok(name)
    };
    files.push(write(format!("curve_seed{seed}.csv"), &report.curve_csv())?);
    files.push(write(format!("spectra_seed{seed}.csv"), &report.spectrum_csv())?);
    let ckpt_name = format!("model_seed{seed}.ckpt");
    let ckpt_path = spec.out.join(&ckpt_name);
    save_checkpoint(&model, &ckpt_path)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", ckpt_path.display())))?;
    files.push(ckpt_name);

    let test = match test_set {
        Some(ts) => Some(
            evaluate(&model, ts, config.loss, config.batch_size)
                .map_err(|e| Error::Config(format!("seed {seed}: test evaluation: {e}")))?,
        ),
        None => None,
    };
    Ok(SeedOutcome {
        seed,
        losses: report.losses().to_vec(),
        files,
        test,
    })
}

/// The `train` subcommand body: one model per seed, per-seed curve,
/// spectrum, and checkpoint files, an averaged curve, and (for tasks
/// with a held-out split) a per-seed test evaluation table.
pub fn run_train(spec: &ExperimentSpec, workers: usize, manifest: &mut RunManifest) -> Result<()> {
    let dataset = build_dataset(&spec.task)?;
    let test_set = build_test_dataset(&spec.task)?;

    let outcomes = parallel_map(workers, spec.seeds.clone(), |_, seed| {
        run_seed(spec, &dataset, test_set.as_ref(), seed)
    });
    let mut collected = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        collected.push(outcome?);
    }

    for outcome in &collected {
        for file in &outcome.files {
            manifest.record_artifact(file);
        }
    }
    let bundle = CurveBundle::new(collected.iter().map(|o| o.losses.clone()).collect())?;
    let (mean, std) = average_curves(&bundle);
    manifest.write_artifact("curve_average.csv", &mean_std_csv(&mean, &std))?;

    if test_set.is_some() {
        let mut csv = String::from("seed,loss,accuracy\n");
        for outcome in &collected {
            let (loss, accuracy) = outcome.test.expect("test split evaluated per seed");
            match accuracy {
                Some(acc) => csv.push_str(&format!("{},{loss:.12},{acc:.12}\n", outcome.seed)),
                None => csv.push_str(&format!("{},{loss:.12},-\n", outcome.seed)),
            }
        }
        manifest.write_artifact("test_eval.csv", &csv)?;
    }

    manifest.insert("task", json!(spec.task.name()));
    manifest.insert("cell", json!(spec.cell.name()));
    manifest.insert("seeds", json!(spec.seeds));
    if spec.non_paper_profile {
        manifest.insert("default_profile", json!("non-paper-default"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FlatConfig;
    use eigenrnn::nets::CellKind;

    fn spec_from(text: &str) -> ExperimentSpec {
        let cfg = FlatConfig::parse("t.cfg", text).unwrap();
        ExperimentSpec::load(&cfg, None, None).unwrap()
    }

    #[test]
    fn parallel_map_keeps_item_order_at_any_worker_count() {
        let items: Vec<u64> = (0..17).collect();
        let expect: Vec<u64> = items.iter().map(|v| v * v).collect();
        for workers in [1, 3, 8, 32] {
            let got = parallel_map(workers, items.clone(), |_, v| v * v);
            assert_eq!(got, expect, "workers = {workers}");
        }
    }

    #[test]
    fn datasets_are_reproducible_from_their_data_seed() {
        let spec = spec_from("task = tomita\nmax_len = 6\nper_class = 8\nout = x\n");
        let a = build_dataset(&spec.task).unwrap();
        let b = build_dataset(&spec.task).unwrap();
        assert_eq!(a.summary_csv(), b.summary_csv());
        assert_eq!(a.len(), 16);
        assert!(build_test_dataset(&spec.task).unwrap().is_none());
    }

    #[test]
    fn caps_truncate_but_zero_keeps_everything() {
        let spec = spec_from("task = tomita\nmax_len = 6\nper_class = 8\nout = x\n");
        let set = build_dataset(&spec.task).unwrap();
        assert_eq!(cap_subset(set.clone(), 0).unwrap().len(), 16);
        assert_eq!(cap_subset(set.clone(), 5).unwrap().len(), 5);
        assert_eq!(cap_subset(set, 99).unwrap().len(), 16);
    }

    #[test]
    fn models_take_their_shape_from_the_dataset() {
        let spec = spec_from("task = tomita\nmax_len = 6\nper_class = 8\nhidden = 5\nout = x\n");
        let dataset = build_dataset(&spec.task).unwrap();
        let (model, _) = build_model(&spec, &dataset, 3).unwrap();
        assert_eq!(model.kind(), CellKind::TanhRnn);
        assert_eq!(model.input_size(), 2);
        assert_eq!(model.hidden_size(), 5);
        assert_eq!(model.output_size(), 2);

        let spec = spec_from("task = mackey\nlength = 40\nhidden = 4\ncell = linear\nout = x\n");
        let dataset = build_dataset(&spec.task).unwrap();
        let (model, _) = build_model(&spec, &dataset, 3).unwrap();
        assert_eq!(model.input_size(), 1);
        assert_eq!(model.output_size(), 1);
    }

    #[test]
    fn the_same_seed_yields_the_same_model_and_stream_seed() {
        let spec = spec_from("task = tomita\nmax_len = 6\nper_class = 8\nout = x\n");
        let dataset = build_dataset(&spec.task).unwrap();
        let (a, sa) = build_model(&spec, &dataset, 11).unwrap();
        let (b, sb) = build_model(&spec, &dataset, 11).unwrap();
        let (c, sc) = build_model(&spec, &dataset, 12).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);
        assert!(a != c || sa != sc);
    }

    #[test]
    fn a_tiny_training_run_writes_every_per_seed_artifact() {
        let dir = tempfile::tempdir().unwrap();
        let text = format!(
            "task = tomita\ngrammar = 1\nmax_len = 4\nper_class = 6\nhidden = 4\n\
             epochs = 2\nbatch = 4\nseeds = 0,1\nout = {}\n",
            dir.path().display()
        );
        let cfg = FlatConfig::parse("t.cfg", &text).unwrap();
        let spec = ExperimentSpec::load(&cfg, None, None).unwrap();
        let mut manifest = RunManifest::new("train", dir.path());
        run_train(&spec, 2, &mut manifest).unwrap();
        let artifacts = manifest.finish(&cfg).unwrap();
        assert_eq!(
            artifacts,
            vec![
                "curve_average.csv",
                "curve_seed0.csv",
                "curve_seed1.csv",
                "model_seed0.ckpt",
                "model_seed1.ckpt",
                "spectra_seed0.csv",
                "spectra_seed1.csv",
                "run.json",
            ]
        );
        for name in &artifacts {
            assert!(dir.path().join(name).is_file(), "{name} missing");
        }
        let average = std::fs::read_to_string(dir.path().join("curve_average.csv")).unwrap();
        assert_eq!(average.lines().count(), 3, "header plus one row per epoch");
    }
}
