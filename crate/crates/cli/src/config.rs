//! Flat key-value experiment configuration.
//!
//! Grammar: one `key = value` assignment per line, split at the first
//! `=`; keys match `[a-z0-9_]+`; whitespace around key and value is
//! trimmed; blank lines and lines whose first non-space character is
//! `#` are skipped (inline `#` belongs to the value); keys are
//! order-insensitive and may appear at most once; values are never
//! expanded from the environment. Every key must be consumed by the
//! subcommand that reads the file — leftovers are reported as unknown
//! keys so a typo cannot silently change a run.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use eigenrnn::data::GrammarId;
use eigenrnn::initializers::InitializerKind;
use eigenrnn::nets::{AdamConfig, CellKind, LossKind, TrainConfig};
use eigenrnn::{Error, Result};

/// One parsed `key = value` assignment.
#[derive(Debug)]
struct Entry {
    line: usize,
    value: String,
}

/// A parsed flat config file with consumption tracking.
#[derive(Debug)]
pub struct FlatConfig {
    path: String,
    entries: BTreeMap<String, Entry>,
    used: RefCell<BTreeSet<String>>,
    defaults: RefCell<BTreeMap<String, String>>,
}

impl FlatConfig {
    /// Read and parse a config file.
    pub fn load(path: &Path) -> Result<FlatConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        FlatConfig::parse(&path.display().to_string(), &text)
    }

    /// Parse config text; `path` is used in error messages only.
    pub fn parse(path: &str, text: &str) -> Result<FlatConfig> {
        let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "config {path} line {line_no}: expected 'key = value', got '{line}'"
                )));
            };
            let key = key.trim();
            let value = value.trim();
            let well_formed = !key.is_empty()
                && key
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
            if !well_formed {
                return Err(Error::Config(format!(
                    "config {path} line {line_no}: invalid key '{key}' (keys are lower-case [a-z0-9_])"
                )));
            }
            if value.is_empty() {
                return Err(Error::Config(format!(
                    "config {path} line {line_no}: key '{key}' has an empty value"
                )));
            }
            if let Some(first) = entries.get(key) {
                return Err(Error::Config(format!(
                    "config {path} line {line_no}: duplicate key '{key}' (first set at line {})",
                    first.line
                )));
            }
            entries.insert(
                key.to_string(),
                Entry {
                    line: line_no,
                    value: value.to_string(),
                },
            );
        }
        Ok(FlatConfig {
            path: path.to_string(),
            entries,
            used: RefCell::new(BTreeSet::new()),
            defaults: RefCell::new(BTreeMap::new()),
        })
    }

    /// The path this config was read from, as shown in messages.
    pub fn path(&self) -> &str {
        &self.path
    }

    /// Raw `key -> value` view, for run metadata.
    pub fn raw_map(&self) -> BTreeMap<String, String> {
        self.entries
            .iter()
            .map(|(k, e)| (k.clone(), e.value.clone()))
            .collect()
    }

    /// Defaults that filled in for absent keys, `key -> value`.
    pub fn defaults_taken(&self) -> BTreeMap<String, String> {
        self.defaults.borrow().clone()
    }

    fn was_defaulted(&self, key: &str) -> bool {
        self.defaults.borrow().contains_key(key)
    }

    fn lookup(&self, key: &str) -> Option<&Entry> {
        self.used.borrow_mut().insert(key.to_string());
        self.entries.get(key)
    }

    /// Build a "config … line … key '…': …" error for a present key.
    fn key_error(&self, key: &str, message: &str) -> Error {
        match self.entries.get(key) {
            Some(e) => Error::Config(format!(
                "config {} line {}: key '{key}': {message}",
                self.path, e.line
            )),
            None => Error::Config(format!("config {}: key '{key}': {message}", self.path)),
        }
    }

    /// Wrap a library error in key/line context.
    fn key_context(&self, key: &str, err: Error) -> Error {
        let inner = match err {
            Error::Config(m) => m,
            other => other.to_string(),
        };
        self.key_error(key, &inner)
    }

    /// Typed optional read; `what` names the expected form in errors.
    pub fn get<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>> {
        match self.lookup(key) {
            None => Ok(None),
            Some(e) => match e.value.parse::<T>() {
                Ok(v) => Ok(Some(v)),
                Err(_) => Err(Error::Config(format!(
                    "config {} line {}: key '{key}': cannot parse '{}' as {what}",
                    self.path, e.line, e.value
                ))),
            },
        }
    }

    /// Typed read with a recorded default.
    pub fn or<T: FromStr + ToString>(&self, key: &str, what: &str, default: T) -> Result<T> {
        match self.get(key, what)? {
            Some(v) => Ok(v),
            None => {
                self.defaults
                    .borrow_mut()
                    .insert(key.to_string(), default.to_string());
                Ok(default)
            }
        }
    }

    /// Reject keys that no reader consumed.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        let mut unknown: Vec<(&String, &Entry)> = self
            .entries
            .iter()
            .filter(|(k, _)| !used.contains(*k))
            .collect();
        unknown.sort_by_key(|(_, e)| e.line);
        if let Some((key, entry)) = unknown.first() {
            return Err(Error::Config(format!(
                "config {} line {}: unknown key '{key}'",
                self.path, entry.line
            )));
        }
        Ok(())
    }
}

/// Resolve the output directory: the `--out` flag wins over the `out`
/// key. The key is consumed either way so it never reads as unknown.
fn resolve_out(config: &FlatConfig, out_flag: Option<PathBuf>) -> Result<PathBuf> {
    let from_key: Option<String> = config.get("out", "a directory path")?;
    match out_flag.or(from_key.map(PathBuf::from)) {
        Some(p) => Ok(p),
        None => Err(Error::Config(format!(
            "config {}: missing required key 'out' (or pass --out)",
            config.path()
        ))),
    }
}

/// Parse a seed list: comma-separated `u64` items where an item may be
/// an inclusive range `a..b`. Returns a plain message on failure so the
/// caller can attach key/line context.
fn parse_seed_list(text: &str) -> std::result::Result<Vec<u64>, String> {
    const MAX_SEEDS: usize = 100_000;
    let mut seeds = Vec::new();
    let mut seen = BTreeSet::new();
    let push = |s: u64, seen: &mut BTreeSet<u64>, seeds: &mut Vec<u64>| {
        if !seen.insert(s) {
            return Err(format!("seed {s} appears more than once"));
        }
        seeds.push(s);
        Ok(())
    };
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err("empty item in seed list".to_string());
        }
        if let Some((a, b)) = item.split_once("..") {
            let a: u64 = a
                .trim()
                .parse()
                .map_err(|_| format!("cannot parse range start '{}'", a.trim()))?;
            let b: u64 = b
                .trim()
                .parse()
                .map_err(|_| format!("cannot parse range end '{}'", b.trim()))?;
            if a > b {
                return Err(format!("range {a}..{b} is reversed (ranges are inclusive)"));
            }
            if (b - a) as usize >= MAX_SEEDS {
                return Err(format!("range {a}..{b} exceeds {MAX_SEEDS} seeds"));
            }
            for s in a..=b {
                push(s, &mut seen, &mut seeds)?;
            }
        } else {
            let s: u64 = item
                .parse()
                .map_err(|_| format!("cannot parse seed '{item}'"))?;
            push(s, &mut seen, &mut seeds)?;
        }
        if seeds.len() > MAX_SEEDS {
            return Err(format!("seed list exceeds {MAX_SEEDS} seeds"));
        }
    }
    if seeds.is_empty() {
        return Err("seed list is empty".to_string());
    }
    Ok(seeds)
}

/// Dataset choice plus its sampling parameters.
#[derive(Debug, Clone)]
pub enum TaskSpec {
    /// Balanced accept/reject strings from one Tomita grammar,
    /// one-hot encoded per symbol.
    Tomita {
        grammar: GrammarId,
        max_len: usize,
        per_class: usize,
        data_seed: u64,
    },
    /// Row-by-row MNIST digit scans from IDX files; `*_cap = 0` keeps
    /// every record.
    Mnist {
        dir: PathBuf,
        train_cap: usize,
        test_cap: usize,
    },
    /// Mackey-Glass next-value regression over one standardized series.
    Mackey { length: usize, warmup: usize },
}

impl TaskSpec {
    pub fn name(&self) -> &'static str {
        match self {
            TaskSpec::Tomita { .. } => "tomita",
            TaskSpec::Mnist { .. } => "mnist",
            TaskSpec::Mackey { .. } => "mackey",
        }
    }
}

/// Everything `train`, `scatter`, and `spectrum` need. One experiment
/// file describes the whole workflow, so all three consume the same
/// key set and a shared config never trips the unknown-key check.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub task: TaskSpec,
    pub cell: CellKind,
    pub hidden: usize,
    /// Per-seed template; the run seed is patched in per seed.
    pub template: TrainConfig,
    pub forget_bias: Option<f64>,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
    pub checkpoint: Option<PathBuf>,
    pub sample_cap: usize,
    pub svg: bool,
    /// True when a Tomita run leaned on desk defaults (hidden 32,
    /// max_len 16, per_class 500, epochs 200) that no publication
    /// prescribes; recorded in run metadata as `non-paper-default`.
    pub non_paper_profile: bool,
}

impl ExperimentSpec {
    pub fn load(
        config: &FlatConfig,
        out_flag: Option<PathBuf>,
        seed_flag: Option<u64>,
    ) -> Result<ExperimentSpec> {
        let task_name: String = config.or("task", "a task name", "tomita".to_string())?;
        let (task, hidden, epochs, lr, loss) = match task_name.as_str() {
            "tomita" => {
                let grammar_raw: u8 = config.or("grammar", "a grammar id", 4u8)?;
                let grammar =
                    GrammarId::new(grammar_raw).map_err(|e| config.key_context("grammar", e))?;
                let task = TaskSpec::Tomita {
                    grammar,
                    max_len: config.or("max_len", "an integer", 16usize)?,
                    per_class: config.or("per_class", "an integer", 500usize)?,
                    data_seed: config.or("data_seed", "an integer", 0u64)?,
                };
                let hidden = config.or("hidden", "an integer", 32usize)?;
                let epochs = config.or("epochs", "an integer", 200usize)?;
                let lr = config.or("lr", "a number", 1e-3)?;
                let loss = LossKind::CrossEntropy {
                    label_smooth: config.or("label_smooth", "a number", 0.0)?,
                };
                (task, hidden, epochs, lr, loss)
            }
            "mnist" => {
                let task = TaskSpec::Mnist {
                    dir: PathBuf::from(config.or(
                        "mnist_dir",
                        "a directory path",
                        "data/mnist".to_string(),
                    )?),
                    train_cap: config.or("train_cap", "an integer", 0usize)?,
                    test_cap: config.or("test_cap", "an integer", 0usize)?,
                };
                let hidden = config.or("hidden", "an integer", 150usize)?;
                let epochs = config.or("epochs", "an integer", 100usize)?;
                let lr = config.or("lr", "a number", 1e-4)?;
                let loss = LossKind::CrossEntropy {
                    label_smooth: config.or("label_smooth", "a number", 0.0)?,
                };
                (task, hidden, epochs, lr, loss)
            }
            "mackey" => {
                if config.get::<String>("label_smooth", "a number")?.is_some() {
                    return Err(
                        config.key_error("label_smooth", "applies to classification tasks only")
                    );
                }
                let task = TaskSpec::Mackey {
                    length: config.or("length", "an integer", 500usize)?,
                    warmup: config.or("warmup", "an integer", 200usize)?,
                };
                let hidden = config.or("hidden", "an integer", 32usize)?;
                let epochs = config.or("epochs", "an integer", 200usize)?;
                let lr = config.or("lr", "a number", 1e-3)?;
                (task, hidden, epochs, lr, LossKind::Mse)
            }
            other => {
                return Err(config.key_error(
                    "task",
                    &format!("expected one of tomita|mnist|mackey, got '{other}'"),
                ))
            }
        };

        let cell_name: String = config.or("cell", "a cell kind", "tanh".to_string())?;
        let cell = CellKind::parse(&cell_name).map_err(|e| config.key_context("cell", e))?;

        let init_name: String = config.or("init", "an initializer kind", "default".to_string())?;
        let mut recurrent_init =
            InitializerKind::parse(&init_name).map_err(|e| config.key_context("init", e))?;
        if let Some(lambda) = config.get::<f64>("lambda", "a number")? {
            match recurrent_init {
                InitializerKind::Eigen { .. } => {
                    recurrent_init = recurrent_init.with_lambda(lambda);
                }
                _ => return Err(config.key_error("lambda", "requires init = eigen")),
            }
        }
        let input_name: String =
            config.or("input_init", "an initializer kind", "default".to_string())?;
        let input_init =
            InitializerKind::parse(&input_name).map_err(|e| config.key_context("input_init", e))?;

        let forget_bias: Option<f64> = config.get("forget_bias", "a number")?;
        if forget_bias.is_some() && cell != CellKind::Lstm {
            return Err(config.key_error(
                "forget_bias",
                &format!("applies to lstm cells only, got cell = {}", cell.name()),
            ));
        }

        let snapshots = match config.get::<String>("snapshots", "an epoch list")? {
            None => None,
            Some(text) => {
                let mut epochs_list = Vec::new();
                for item in text.split(',') {
                    let item = item.trim();
                    let e: usize = item.parse().map_err(|_| {
                        config.key_error("snapshots", &format!("cannot parse epoch '{item}'"))
                    })?;
                    epochs_list.push(e);
                }
                Some(epochs_list)
            }
        };

        let seeds_raw: Option<String> = config.get("seeds", "a seed list")?;
        let seeds = match seed_flag {
            Some(s) => vec![s],
            None => match seeds_raw {
                Some(ref text) => {
                    parse_seed_list(text).map_err(|m| config.key_error("seeds", &m))?
                }
                None => {
                    config
                        .defaults
                        .borrow_mut()
                        .insert("seeds".to_string(), "0".to_string());
                    vec![0]
                }
            },
        };

        let out = resolve_out(config, out_flag)?;
        let checkpoint: Option<PathBuf> = config
            .get::<String>("checkpoint", "a file path")?
            .map(PathBuf::from);
        let sample_cap = config.or("sample_cap", "an integer", 10_000usize)?;
        let svg = config.or("svg", "true or false", true)?;

        let mut template = TrainConfig::new(loss, epochs, 0);
        template.adam = AdamConfig::with_learning_rate(lr);
        template.batch_size = config.or("batch", "an integer", 32usize)?;
        template.recurrent_init = recurrent_init;
        template.input_init = input_init;
        template.snapshot_epochs = snapshots;
        template
            .validate()
            .map_err(|e| Error::Config(format!("config {}: {e}", config.path())))?;

        let non_paper_profile = matches!(task, TaskSpec::Tomita { .. })
            && ["hidden", "max_len", "per_class", "epochs"]
                .iter()
                .any(|k| config.was_defaulted(k));

        config.finish()?;
        Ok(ExperimentSpec {
            task,
            cell,
            hidden,
            template,
            forget_bias,
            seeds,
            out,
            checkpoint,
            sample_cap,
            svg,
            non_paper_profile,
        })
    }
}

/// Parameters for the initializer comparison table.
#[derive(Debug, Clone)]
pub struct Table3Spec {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl Table3Spec {
    pub fn load(
        config: &FlatConfig,
        out_flag: Option<PathBuf>,
        seed_flag: Option<u64>,
    ) -> Result<Table3Spec> {
        let n = config.or("n", "an integer", 8usize)?;
        let trials = config.or("trials", "an integer", 500usize)?;
        if trials < 2 {
            return Err(Error::Config(format!(
                "table3 needs at least 2 trials, got {trials}"
            )));
        }
        let seed = match seed_flag {
            Some(s) => s,
            None => config.or("seed", "an integer", 0u64)?,
        };
        let out = resolve_out(config, out_flag)?;
        config.finish()?;
        Ok(Table3Spec {
            n,
            trials,
            seed,
            out,
        })
    }
}

/// Parameters for the eigen-domain reconstruction check.
#[derive(Debug, Clone)]
pub struct IirSpec {
    pub systems: usize,
    pub n_max: u64,
    pub t_max: u64,
    pub tol: f64,
    pub seed: u64,
    pub out: PathBuf,
}

impl IirSpec {
    pub fn load(
        config: &FlatConfig,
        out_flag: Option<PathBuf>,
        seed_flag: Option<u64>,
    ) -> Result<IirSpec> {
        let systems = config.or("systems", "an integer", 100usize)?;
        if systems == 0 {
            return Err(Error::Config("iir-check needs at least 1 system".into()));
        }
        let n_max = config.or("n_max", "an integer", 8u64)?;
        if n_max == 0 {
            return Err(Error::Config("iir-check needs n_max >= 1".into()));
        }
        let t_max = config.or("t_max", "an integer", 50u64)?;
        if t_max < 2 {
            return Err(Error::Config(format!(
                "iir-check needs t_max >= 2, got {t_max}"
            )));
        }
        let tol = config.or("tol", "a number", 1e-8)?;
        if !(tol > 0.0) {
            return Err(Error::Config(format!(
                "iir-check tolerance must be positive, got {tol}"
            )));
        }
        let seed = match seed_flag {
            Some(s) => s,
            None => config.or("seed", "an integer", 0u64)?,
        };
        let out = resolve_out(config, out_flag)?;
        config.finish()?;
        Ok(IirSpec {
            systems,
            n_max,
            t_max,
            tol,
            seed,
            out,
        })
    }
}
