//! Config file loading, `--set` overrides, and the CLI error/exit split.
//!
//! One JSON shape serves every subcommand; each command names the fields it
//! needs and rejects runs that omit them. Malformed input of any kind maps
//! to exit 2 before an output file is touched; violated preconditions of an
//! otherwise well-formed run map to exit 3.

use std::path::PathBuf;
use std::process::ExitCode;

use modelspace_core::blaschke::ZeroSequence;
use modelspace_core::experiments::{ExperimentConfig, Family, GammaSpec, TraceSpec};
use modelspace_core::seq::ValueSequence;
use modelspace_core::Error as CoreError;
use serde::Deserialize;

#[derive(Debug)]
pub enum CliError {
    /// Unusable invocation or config file; exit 2, nothing written.
    Config(String),
    /// Well-formed run that violates an operation precondition; exit 3.
    Precondition(String),
    /// Raised only under `--strict` after output is written; exit 4.
    NotConverged,
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Precondition(_) => ExitCode::from(3),
            CliError::NotConverged => ExitCode::from(4),
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(m) => format!("config error: {m}"),
            CliError::Precondition(m) => format!("precondition violated: {m}"),
            CliError::NotConverged => {
                "strict mode: a quadrature loop hit its node cap before converging".into()
            }
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            // malformed input data
            CoreError::PointOutsideDisk(_)
            | CoreError::GapOutOfRange(_)
            | CoreError::GapTooSmall(_)
            | CoreError::GapInconsistent { .. }
            | CoreError::SequenceLength { .. }
            | CoreError::DuplicateZeros(..)
            | CoreError::InvalidGamma { .. }
            | CoreError::UnsupportedParameter(_)
            | CoreError::InvalidConfig(_) => CliError::Config(e.to_string()),
            // violated operation contracts on well-formed data
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

/// Everything a config file may specify. Scans read the experiment fields,
/// direct operations read `zeros`/`values`; unknown keys are errors.
/// `zeros` is an inline array or a path string to a JSON file holding one.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub zeros: Option<ZeroSequence>,
    pub values: Option<ValueSequence>,
    pub threshold: Option<f64>,
    pub grid_cap: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub residue_index: Option<usize>,
    pub boundary_dump: Option<PathBuf>,
    pub boundary_nodes: Option<usize>,
    pub family: Option<Family>,
    pub n_values: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub gamma: Option<GammaSpec>,
    pub traces: Option<TraceSpec>,
}

/// Parses one `key=value` override; dotted keys descend into objects and
/// the value is JSON when it parses, a bare string otherwise.
fn apply_set(tree: &mut serde_json::Value, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set '{spec}' is not key=value")))?;
    if path.is_empty() {
        return Err(CliError::Config(format!("--set '{spec}' has an empty key")));
    }
    let value: serde_json::Value = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut node = tree;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, segment) in segments.iter().enumerate() {
        let map = node.as_object_mut().ok_or_else(|| {
            CliError::Config(format!(
                "--set path '{path}' crosses the non-object entry '{}'",
                segments[..i].join(".")
            ))
        })?;
        if i + 1 == segments.len() {
            map.insert(segment.to_string(), value);
            return Ok(());
        }
        node = map
            .entry(segment.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    unreachable!("loop always returns on the last segment");
}

/// A `"zeros": "file.json"` string is replaced by that file's JSON array;
/// relative references resolve against the config file's directory.
fn inline_zeros_reference(
    tree: &mut serde_json::Value,
    config_path: &std::path::Path,
) -> Result<(), CliError> {
    let Some(reference) = tree.get("zeros").and_then(|v| v.as_str()) else {
        return Ok(());
    };
    let mut target = PathBuf::from(reference);
    if target.is_relative() {
        if let Some(dir) = config_path.parent() {
            target = dir.join(target);
        }
    }
    let text = std::fs::read_to_string(&target).map_err(|e| {
        CliError::Config(format!("cannot read zeros file {}: {e}", target.display()))
    })?;
    let zeros: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        CliError::Config(format!("{} is not valid JSON: {e}", target.display()))
    })?;
    tree["zeros"] = zeros;
    Ok(())
}

/// Loads the config file, applies `--set` overrides, resolves a zeros file
/// reference, and deserializes.
pub fn load(path: &PathBuf, sets: &[String]) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut tree: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{} is not valid JSON: {e}", path.display())))?;
    if !tree.is_object() {
        return Err(CliError::Config(format!(
            "{} must hold a JSON object",
            path.display()
        )));
    }
    for spec in sets {
        apply_set(&mut tree, spec)?;
    }
    inline_zeros_reference(&mut tree, path)?;
    serde_json::from_value(tree)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl FileConfig {
    pub fn require_zeros(&self) -> Result<&ZeroSequence, CliError> {
        self.zeros
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs a 'zeros' array".into()))
    }

    pub fn require_values(&self) -> Result<&ValueSequence, CliError> {
        self.values
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs a 'values' array".into()))
    }

    /// Experiment config from the scan fields plus core defaults.
    pub fn experiment(&self) -> Result<ExperimentConfig, CliError> {
        let family = self
            .family
            .clone()
            .ok_or_else(|| CliError::Config("this command needs a 'family' object".into()))?;
        let mut config = ExperimentConfig::new(family);
        if let Some(n_values) = &self.n_values {
            config.n_values = n_values.clone();
        }
        if let Some(trials) = self.trials {
            config.trials = trials;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(grid_cap) = self.grid_cap {
            config.grid_cap = grid_cap;
        }
        if let Some(threshold) = self.threshold {
            config.threshold = threshold;
        }
        if let Some(gamma) = &self.gamma {
            config.gamma = gamma.clone();
        }
        if let Some(traces) = &self.traces {
            config.traces = traces.clone();
        }
        Ok(config)
    }
}
