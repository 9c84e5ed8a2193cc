//! Run configuration: one JSON document plus `--set key=value` overrides.

use std::path::Path;

use cergm::graph::GraphMotif;
use cergm::{ChainConfig, ConstraintSpec, ModelSpec};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Exact,
    Variational,
    Bounds,
    Sample,
    Integrate,
    Compare,
    Scan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Exact => "exact",
            Command::Variational => "variational",
            Command::Bounds => "bounds",
            Command::Sample => "sample",
            Command::Integrate => "integrate",
            Command::Compare => "compare",
            Command::Scan => "scan",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// A motif given by name (`"triangle"`, `"star3"`, ...) or by a list of
/// 1-based edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MotifConfig {
    Name(String),
    Edges(Vec<[usize; 2]>),
}

impl MotifConfig {
    fn build(&self) -> cergm::Result<GraphMotif> {
        match self {
            MotifConfig::Name(name) => GraphMotif::from_name(name),
            MotifConfig::Edges(edges) => GraphMotif::from_one_based_edges(edges),
        }
    }
}

fn default_motifs() -> Vec<MotifConfig> {
    vec![MotifConfig::Name("edge".into())]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n: usize,
    #[serde(default = "default_motifs")]
    pub motifs: Vec<MotifConfig>,
    pub zetas: Vec<f64>,
    #[serde(default)]
    pub e: Option<f64>,
    #[serde(default)]
    pub t: Option<f64>,
}

fn one() -> f64 {
    1.0
}

/// Constants of the asymptotic bounds; the theory leaves them unspecified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "one", rename = "C")]
    pub big_c: f64,
    #[serde(default = "one")]
    pub covering_c: f64,
    #[serde(default = "one", rename = "covering_C")]
    pub covering_big_c: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            c: 1.0,
            big_c: 1.0,
            covering_c: 1.0,
            covering_big_c: 1.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    pub seed: Option<u64>,
    pub sweeps: Option<u64>,
    pub burn_in: Option<u64>,
    pub thin: Option<u64>,
    pub move_mix: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateSection {
    pub nodes: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMethod {
    Exact,
    Variational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// `"e"`, `"t"` or `"zeta<i>"` with 1-based `i`.
    pub parameter: String,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub from: Option<f64>,
    #[serde(default)]
    pub to: Option<f64>,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default = "default_methods")]
    pub methods: Vec<ScanMethod>,
}

fn default_methods() -> Vec<ScanMethod> {
    vec![ScanMethod::Variational]
}

/// Scan parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanParameter {
    E,
    T,
    Zeta(usize),
}

impl ScanSection {
    pub fn parameter(&self, s: usize) -> Result<ScanParameter, CliError> {
        match self.parameter.as_str() {
            "e" => Ok(ScanParameter::E),
            "t" => Ok(ScanParameter::T),
            p => p
                .strip_prefix("zeta")
                .and_then(|i| i.parse::<usize>().ok())
                .filter(|i| (1..=s).contains(i))
                .map(|i| ScanParameter::Zeta(i - 1))
                .ok_or_else(|| {
                    CliError::Config(format!(
                        "scan parameter {p:?} must be e, t or zeta1..zeta{s}"
                    ))
                }),
        }
    }

    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        match (&self.values, self.from, self.to, self.steps) {
            (Some(v), None, None, None) if !v.is_empty() => Ok(v.clone()),
            (None, Some(a), Some(b), Some(k)) if k >= 2 => Ok((0..k)
                .map(|i| a + (b - a) * i as f64 / (k - 1) as f64)
                .collect()),
            (None, Some(a), Some(_), Some(1)) => Ok(vec![a]),
            _ => Err(CliError::Config(
                "scan needs either a nonempty `values` list or `from`, `to` and `steps`".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    pub model: ModelConfig,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub chain: Option<ChainSection>,
    #[serde(default)]
    pub integrate: IntegrateSection,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub scan: Option<ScanSection>,
    #[serde(default)]
    pub max_n: Option<usize>,
    #[serde(default)]
    pub output: OutputSection,
}

/// Where results go when `--output` / `--format` are not given.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub path: Option<std::path::PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

pub const DEFAULT_NODES: usize = 16;

impl RunConfig {
    /// Reads `path` and applies `key=value` overrides; keys are dotted paths
    /// and values are JSON (bare words are taken as strings).
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut doc: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        serde_json::from_value(doc).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_value(doc: Value) -> Result<Self, CliError> {
        serde_json::from_value(doc).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn model(&self) -> Result<ModelSpec, CliError> {
        let motifs = self
            .model
            .motifs
            .iter()
            .map(MotifConfig::build)
            .collect::<cergm::Result<Vec<_>>>()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let model = ModelSpec::new(self.model.n, motifs, self.model.zetas.clone())
            .map_err(|e| CliError::Config(e.to_string()))?;
        match (self.model.e, self.model.t) {
            (Some(e), Some(t)) => Ok(model.with_constraint(
                ConstraintSpec::new(e, t).map_err(|e| CliError::Config(e.to_string()))?,
            )),
            (None, None) => Ok(model),
            _ => Err(CliError::Config(
                "model.e and model.t must be given together".into(),
            )),
        }
    }

    pub fn constrained_model(&self) -> Result<ModelSpec, CliError> {
        let m = self.model()?;
        if m.constraint().is_none() {
            return Err(CliError::Config(
                "this command needs model.e and model.t".into(),
            ));
        }
        Ok(m)
    }

    pub fn chain_config(&self) -> ChainConfig {
        let d = ChainConfig::default();
        let c = self.chain.clone().unwrap_or_default();
        ChainConfig {
            seed: c.seed.unwrap_or(d.seed),
            sweeps: c.sweeps.unwrap_or(d.sweeps),
            burn_in: c.burn_in.unwrap_or(d.burn_in),
            thin: c.thin.unwrap_or(d.thin),
            move_mix: c.move_mix.unwrap_or(d.move_mix),
            ..d
        }
    }

    pub fn nodes(&self) -> usize {
        self.integrate.nodes.unwrap_or(DEFAULT_NODES)
    }

    /// `κ` checked to exceed 8, when given.
    pub fn kappa(&self) -> Result<Option<f64>, CliError> {
        match self.kappa {
            Some(k) if !(k > 8.0) => Err(CliError::Config(format!("kappa = {k} must exceed 8"))),
            k => Ok(k),
        }
    }

    /// `--seed` replaces `chain.seed`.
    pub fn set_seed(&mut self, seed: u64) {
        self.chain.get_or_insert_with(ChainSection::default).seed = Some(seed);
    }
}

fn apply_override(doc: &mut Value, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override {spec:?} is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| CliError::Config(format!("{key}: {part:?} is not an index")))?;
                let len = items.len();
                let slot = items.get_mut(idx).ok_or_else(|| {
                    CliError::Config(format!("{key}: index {idx} out of range ({len} items)"))
                })?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(CliError::Config(format!(
                    "{key}: {part:?} is not inside an object"
                )))
            }
        };
    }
    Err(CliError::Config(format!("empty override key in {spec:?}")))
}
