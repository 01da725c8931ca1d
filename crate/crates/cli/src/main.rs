//! `eigenrnn` — experiment runner for the spectral laboratory.
//!
//! Subcommands: `table3` (initializer statistics), `train` (per-seed
//! training runs), `scatter` (hidden-state projection of a checkpoint),
//! `spectrum` (recurrent eigenvalues of a checkpoint), and `iir-check`
//! (eigen-domain reconstruction vs. the direct recurrence). Every run
//! is configured by a flat `key = value` file and is deterministic
//! given that file: rerunning writes byte-identical artifacts, except
//! for the wall-time line of `run.json`.

mod artifacts;
mod config;
mod pipeline;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eigenrnn::analysis::{hidden_scatter, iir_reconstruct, recurrent_spectrum};
use eigenrnn::initializers::{spectrum_stats, InitializerKind, SpectrumStats};
use eigenrnn::linalg::{Matrix, Rng};
use eigenrnn::nets::{load_checkpoint, CellParams};
use eigenrnn::{Error, Result};
use serde_json::json;

use artifacts::{ensure_out_dir, RunManifest};
use config::{ExperimentSpec, FlatConfig, IirSpec, Table3Spec};

/// Spectral laboratory for recurrent networks.
#[derive(Parser)]
#[command(name = "eigenrnn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ranked eigenvalue-modulus statistics for every initializer
    Table3(CommonArgs),
    /// Train one model per seed; write curves, spectra, checkpoints
    Train(CommonArgs),
    /// Project a checkpoint's hidden states onto two principal components
    Scatter(CheckpointArgs),
    /// Dump the eigenvalue spectrum of a checkpoint's recurrent blocks
    Spectrum(CheckpointArgs),
    /// Compare the eigen-domain reconstruction with the direct recurrence
    IirCheck(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key=value config file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `out` key)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace the config's seed list with this single seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the per-seed / per-kind fanout
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct CheckpointArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Model checkpoint (overrides the config's `checkpoint` key)
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', "; "));
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Table3(args) => cmd_table3(args),
        Command::Train(args) => cmd_train(args),
        Command::Scatter(args) => cmd_scatter(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::IirCheck(args) => cmd_iir_check(args),
    }
}

fn cmd_table3(args: CommonArgs) -> Result<()> {
    let cfg = FlatConfig::load(&args.config)?;
    let spec = Table3Spec::load(&cfg, args.out, args.seed)?;
    ensure_out_dir(&spec.out)?;
    let mut manifest = RunManifest::new("table3", &spec.out);

    // Derive one stream per kind up front, so worker count and
    // scheduling cannot change any byte of the output.
    let kinds = InitializerKind::all_default();
    let mut master = Rng::new(spec.seed);
    let jobs: Vec<(InitializerKind, Rng)> = kinds.iter().map(|k| (*k, master.split())).collect();
    let results = pipeline::parallel_map(args.workers, jobs, |_, (kind, mut rng)| {
        spectrum_stats::<f64>(kind, spec.n, spec.trials, &mut rng).map(|stats| (kind, stats))
    });
    let mut collected: Vec<(InitializerKind, SpectrumStats<f64>)> = Vec::new();
    for result in results {
        collected.push(result?);
    }

    for (kind, stats) in &collected {
        manifest.write_artifact(&format!("table3_{}.csv", kind.name()), &stats.to_csv())?;
    }
    let mut combined = String::from("rank");
    for (kind, _) in &collected {
        combined.push(',');
        combined.push_str(kind.name());
    }
    combined.push('\n');
    for rank in 0..spec.n {
        combined.push_str(&format!("{}", rank + 1));
        for (_, stats) in &collected {
            combined.push_str(&format!(",{:.12}", stats.ordered_means[rank]));
        }
        combined.push('\n');
    }
    manifest.write_artifact("table3_combined.csv", &combined)?;

    manifest.insert("n", json!(spec.n));
    manifest.insert("trials", json!(spec.trials));
    manifest.insert("seed", json!(spec.seed));
    manifest.finish(&cfg)?;
    Ok(())
}

fn cmd_train(args: CommonArgs) -> Result<()> {
    let cfg = FlatConfig::load(&args.config)?;
    let spec = ExperimentSpec::load(&cfg, args.out, args.seed)?;
    ensure_out_dir(&spec.out)?;
    let mut manifest = RunManifest::new("train", &spec.out);
    pipeline::run_train(&spec, args.workers, &mut manifest)?;
    manifest.finish(&cfg)?;
    Ok(())
}

fn resolve_checkpoint(flag: Option<PathBuf>, spec: &ExperimentSpec) -> Result<PathBuf> {
    let path = flag.or_else(|| spec.checkpoint.clone()).ok_or_else(|| {
        Error::Config("missing checkpoint: pass --checkpoint or set the 'checkpoint' key".into())
    })?;
    if !path.is_file() {
        return Err(Error::Config(format!(
            "checkpoint {} does not exist",
            path.display()
        )));
    }
    Ok(path)
}

fn load_model(path: &Path) -> Result<CellParams<f64>> {
    load_checkpoint::<f64>(path)
        .map_err(|e| Error::Config(format!("checkpoint {}: {e}", path.display())))
}

fn cmd_scatter(args: CheckpointArgs) -> Result<()> {
    let cfg = FlatConfig::load(&args.common.config)?;
    let spec = ExperimentSpec::load(&cfg, args.common.out, args.common.seed)?;
    let ckpt = resolve_checkpoint(args.checkpoint, &spec)?;
    let model = load_model(&ckpt)?;
    let dataset = pipeline::build_dataset(&spec.task)?;
    ensure_out_dir(&spec.out)?;
    let mut manifest = RunManifest::new("scatter", &spec.out);

    let plot = hidden_scatter(&model, &dataset, spec.sample_cap)?;
    manifest.write_artifact("scatter.csv", &plot.csv())?;
    if spec.svg {
        manifest.write_artifact("scatter.svg", &svg::scatter_svg(&plot))?;
    }
    manifest.insert("checkpoint", json!(ckpt.display().to_string()));
    manifest.insert("points", json!(plot.len()));
    manifest.insert("task", json!(spec.task.name()));
    manifest.finish(&cfg)?;
    Ok(())
}

fn cmd_spectrum(args: CheckpointArgs) -> Result<()> {
    let cfg = FlatConfig::load(&args.common.config)?;
    let spec = ExperimentSpec::load(&cfg, args.common.out, args.common.seed)?;
    let ckpt = resolve_checkpoint(args.checkpoint, &spec)?;
    let model = load_model(&ckpt)?;
    ensure_out_dir(&spec.out)?;
    let mut manifest = RunManifest::new("spectrum", &spec.out);

    let snapshot = recurrent_spectrum(&model, 0)?;
    let mut csv = String::from("epoch,block,rank,modulus\n");
    snapshot.write_csv_rows(&mut csv);
    manifest.write_artifact("spectrum.csv", &csv)?;
    manifest.insert("checkpoint", json!(ckpt.display().to_string()));
    manifest.insert("max_modulus", json!(snapshot.max_modulus()));
    manifest.finish(&cfg)?;
    Ok(())
}

fn random_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Matrix<f64> {
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.uniform(-1.0, 1.0)).collect();
    Matrix::from_vec(rows, cols, data).expect("shape matches data length")
}

fn cmd_iir_check(args: CommonArgs) -> Result<()> {
    let cfg = FlatConfig::load(&args.config)?;
    let spec = IirSpec::load(&cfg, args.out, args.seed)?;
    ensure_out_dir(&spec.out)?;
    let mut manifest = RunManifest::new("iir-check", &spec.out);

    let mut rng = Rng::new(spec.seed);
    let mut csv = String::from("system,n,steps,max_abs_error\n");
    let mut worst = 0.0f64;
    let mut worst_system = 0usize;
    for system in 0..spec.systems {
        let n = (1 + rng.below(spec.n_max)) as usize;
        let inputs_dim = (1 + rng.below(4)) as usize;
        let steps = (2 + rng.below(spec.t_max - 1)) as usize;
        let mut w_h = random_matrix(n, n, &mut rng);
        // The Frobenius norm bounds the spectral radius, so rescaling
        // to ‖W‖_F = 0.9 guarantees a stable system.
        let norm = w_h.frobenius_norm();
        if norm > 0.0 {
            let scale = 0.9 / norm;
            w_h = w_h.map(|v| v * scale);
        }
        let w_x = random_matrix(n, inputs_dim, &mut rng);
        let inputs = random_matrix(steps, inputs_dim, &mut rng);

        let recon = iir_reconstruct(&w_h, &w_x, &inputs, steps)?;
        let mut h = vec![0.0f64; n];
        let mut err = 0.0f64;
        for t in 0..steps {
            let mut next = vec![0.0f64; n];
            for (i, slot) in next.iter_mut().enumerate() {
                let mut sum = 0.0;
                for j in 0..n {
                    sum += w_h[(i, j)] * h[j];
                }
                for j in 0..inputs_dim {
                    sum += w_x[(i, j)] * inputs[(t, j)];
                }
                *slot = sum;
            }
            h = next;
            for i in 0..n {
                err = err.max((recon[(t, i)] - h[i]).abs());
            }
        }
        csv.push_str(&format!("{system},{n},{steps},{err:.3e}\n"));
        if err > worst {
            worst = err;
            worst_system = system;
        }
    }
    manifest.write_artifact("iir_check.csv", &csv)?;
    manifest.insert("systems", json!(spec.systems));
    manifest.insert("seed", json!(spec.seed));
    manifest.insert("tolerance", json!(spec.tol));
    manifest.insert("worst_abs_error", json!(format!("{worst:.3e}")));
    manifest.finish(&cfg)?;
    if worst > spec.tol {
        let tol = spec.tol;
        return Err(Error::Config(format!(
            "iir-check failed: system {worst_system} deviates by {worst:.3e} (tolerance {tol:.3e})"
        )));
    }
    Ok(())
}
