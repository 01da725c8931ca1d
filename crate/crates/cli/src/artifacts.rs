//! Artifact writing: CSV files and the `run.json` manifest.
//!
//! Every subcommand writes its data files first and `run.json` last,
//! so a manifest on disk means the run completed. All content is
//! deterministic given the config; the only exception is the manifest's
//! `wall_time_seconds` field, which sits on its own line so downstream
//! comparisons can normalize it away.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use eigenrnn::{Error, Result};
use serde_json::{json, Map, Value};

use crate::config::FlatConfig;

/// Write `content`, naming the path in any failure.
pub fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

/// Create the output directory, naming it in any failure.
pub fn ensure_out_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path)
        .map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", path.display())))
}

/// Accumulates the run manifest while a subcommand works.
pub struct RunManifest {
    command: &'static str,
    started: Instant,
    out_dir: PathBuf,
    artifacts: Vec<String>,
    extra: BTreeMap<String, Value>,
}

impl RunManifest {
    pub fn new(command: &'static str, out_dir: &Path) -> RunManifest {
        RunManifest {
            command,
            started: Instant::now(),
            out_dir: out_dir.to_path_buf(),
            artifacts: Vec::new(),
            extra: BTreeMap::new(),
        }
    }

    /// Write one artifact into the output directory and record it.
    pub fn write_artifact(&mut self, name: &str, content: &str) -> Result<()> {
        write_text(&self.out_dir.join(name), content)?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    /// Record an artifact written by other means (e.g. a checkpoint).
    pub fn record_artifact(&mut self, name: &str) {
        self.artifacts.push(name.to_string());
    }

    /// Attach an extra top-level manifest field.
    pub fn insert(&mut self, key: &str, value: Value) {
        self.extra.insert(key.to_string(), value);
    }

    /// Write `run.json` and return the full artifact list.
    pub fn finish(mut self, config: &FlatConfig) -> Result<Vec<String>> {
        self.artifacts.sort();
        self.artifacts.push("run.json".to_string());
        let mut root = Map::new();
        root.insert("command".into(), json!(self.command));
        root.insert("config".into(), json!(config.raw_map()));
        root.insert("config_defaults".into(), json!(config.defaults_taken()));
        root.insert("config_path".into(), json!(config.path()));
        root.insert("artifacts".into(), json!(self.artifacts));
        root.insert(
            "versions".into(),
            json!({
                "eigenrnn": env!("CARGO_PKG_VERSION"),
                "eigenrnn-cli": env!("CARGO_PKG_VERSION"),
            }),
        );
        for (k, v) in self.extra {
            root.insert(k, v);
        }
        root.insert(
            "wall_time_seconds".into(),
            json!(self.started.elapsed().as_secs_f64()),
        );
        let text = serde_json::to_string_pretty(&Value::Object(root))
            .expect("manifest values are plain JSON");
        write_text(&self.out_dir.join("run.json"), &(text + "\n"))?;
        Ok(self.artifacts)
    }
}

/// Render an `epoch,mean,std` CSV from averaged curves.
pub fn mean_std_csv(mean: &[f64], std: &[f64]) -> String {
    let mut out = String::from("epoch,mean,std\n");
    for (i, (m, s)) in mean.iter().zip(std).enumerate() {
        out.push_str(&format!("{},{m:.12},{s:.12}\n", i + 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifests_are_sorted_and_list_run_json_itself() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = FlatConfig::parse("m.cfg", "out = x\n").unwrap();
        let _ = cfg.get::<String>("out", "a path").unwrap();
        let mut manifest = RunManifest::new("train", dir.path());
        manifest.write_artifact("b.csv", "x\n").unwrap();
        manifest.write_artifact("a.csv", "y\n").unwrap();
        manifest.insert("seeds", json!([1, 2]));
        let artifacts = manifest.finish(&cfg).unwrap();
        assert_eq!(artifacts, vec!["a.csv", "b.csv", "run.json"]);

        let text = std::fs::read_to_string(dir.path().join("run.json")).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["command"], "train");
        assert_eq!(parsed["config"]["out"], "x");
        assert_eq!(parsed["seeds"], json!([1, 2]));
        // The volatile field sits alone on its line for easy masking.
        let wall_lines: Vec<&str> = text
            .lines()
            .filter(|l| l.contains("wall_time_seconds"))
            .collect();
        assert_eq!(wall_lines.len(), 1);
    }

    #[test]
    fn mean_std_rows_are_one_indexed() {
        let csv = mean_std_csv(&[0.5, 0.25], &[0.1, 0.05]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "epoch,mean,std");
        assert!(lines[1].starts_with("1,0.5"));
        assert!(lines[2].starts_with("2,0.25"));
    }
}
