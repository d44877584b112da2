//! Run configuration: a TOML file with a `[model]` table and an optional
//! `[experiment]` table. Unknown keys, and model keys that do not apply to
//! the chosen model type, are errors.
//!
//! ```toml
//! [model]
//! type = "II"
//! lambda1 = 1
//! lambda2 = 1
//! alpha1 = 3
//! alpha2 = 2
//! beta1 = 1
//! beta2 = 1
//!
//! [experiment]
//! initial = [500, 500]
//! seed = 7
//! runs = 20
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rates::{
    validate, AuxUrnModel, InteractionFunction, Model, ReuterModel, State, TypeIIModel, TypeIModel,
    Violation,
};
use crate::sim::{Clock, Recording};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Parse(String),
    #[error("model type {kind} requires `{key}`")]
    Missing {
        kind: &'static str,
        key: &'static str,
    },
    #[error("`{key}` does not apply to model type {kind}")]
    NotApplicable {
        kind: &'static str,
        key: &'static str,
    },
    #[error("override `{0}` is not of the form section.key=value")]
    BadOverride(String),
    #[error("model violates: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "I")]
    TypeI,
    #[serde(rename = "II")]
    TypeII,
    #[serde(rename = "urn")]
    Urn,
    #[serde(rename = "reuter-immigration-death")]
    ReuterImmigrationDeath,
}

impl ModelKind {
    fn name(self) -> &'static str {
        match self {
            ModelKind::TypeI => "I",
            ModelKind::TypeII => "II",
            ModelKind::Urn => "urn",
            ModelKind::ReuterImmigrationDeath => "reuter-immigration-death",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(rename = "type")]
    pub kind: ModelKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta2: Option<f64>,
    /// Type II only: reject zero `β`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g1_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g1_index: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g1_log: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g2_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g2_index: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g2_log: Option<f64>,
    /// Urn weights.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClockKind {
    Continuous,
    JumpChain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordingKind {
    Full,
    Thinned,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionKind {
    Power,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesSource {
    /// Scan the model's rates line by line.
    Model,
    /// Closed form for symmetric linear type II parameters.
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub initial: [u64; 2],
    /// Master seed; every trajectory seed is derived from it.
    pub seed: u64,
    /// Number of trajectories.
    pub runs: usize,
    pub jumps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_time: Option<f64>,
    pub stop_on_boundary: bool,
    pub clock: ClockKind,
    pub recording: RecordingKind,
    pub burn_in: f64,
    /// Fraction of runs expected to be confined; reported, not enforced.
    pub confine_threshold: f64,
    /// Hitting starts; empty means `[initial]`.
    pub starts: Vec<[u64; 2]>,
    /// Jump cap for hitting runs.
    pub cap: u64,
    pub function: FunctionKind,
    pub nu: f64,
    pub mu: f64,
    pub levels: Vec<u64>,
    pub x_hi: u64,
    pub urn_steps: u64,
    pub n_max: u64,
    pub series_k: usize,
    pub series_source: SeriesSource,
    /// Step at which the killed `S` exponent is evaluated (`lln`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lamperti_n: Option<u64>,
    /// Also write per-run CSV files.
    pub csv: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            initial: [1, 1],
            seed: 1,
            runs: 1,
            jumps: 100_000,
            max_time: None,
            stop_on_boundary: false,
            clock: ClockKind::Continuous,
            recording: RecordingKind::Thinned,
            burn_in: 0.5,
            confine_threshold: 0.95,
            starts: Vec::new(),
            cap: 10_000_000,
            function: FunctionKind::Power,
            nu: 0.3,
            mu: 0.6,
            levels: vec![0, 1],
            x_hi: 1_000_000,
            urn_steps: 1000,
            n_max: 1_000_000,
            series_k: 200,
            series_source: SeriesSource::Model,
            lamperti_n: None,
            csv: false,
        }
    }
}

impl ExperimentConfig {
    pub fn initial_state(&self) -> State {
        State::xy(self.initial[0], self.initial[1])
    }

    pub fn hitting_starts(&self) -> Vec<State> {
        if self.starts.is_empty() {
            vec![self.initial_state()]
        } else {
            self.starts.iter().map(|p| State::xy(p[0], p[1])).collect()
        }
    }

    pub fn clock(&self) -> Clock {
        match self.clock {
            ClockKind::Continuous => Clock::Continuous,
            ClockKind::JumpChain => Clock::JumpChain,
        }
    }

    pub fn recording(&self) -> Recording {
        match self.recording {
            RecordingKind::Full => Recording::Full,
            RecordingKind::Thinned => Recording::default(),
            RecordingKind::Off => Recording::Off,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub experiment: ExperimentConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Self::from_toml_with(text, &[])
    }

    /// Parses `text` and applies `section.key=value` overrides; a value that is
    /// not valid TOML is taken as a string.
    pub fn from_toml_with(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        for ov in overrides {
            let (path, raw) = ov
                .split_once('=')
                .ok_or_else(|| ConfigError::BadOverride(ov.clone()))?;
            let (section, key) = path
                .trim()
                .split_once('.')
                .ok_or_else(|| ConfigError::BadOverride(ov.clone()))?;
            let value = toml::from_str::<toml::Table>(&format!("v = {}", raw.trim()))
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
            let entry = table
                .entry(section.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            match entry {
                toml::Value::Table(t) => {
                    t.insert(key.to_string(), value);
                }
                _ => return Err(ConfigError::BadOverride(ov.clone())),
            }
        }
        let cfg: RunConfig = table
            .try_into()
            .map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.model()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_with(&text, overrides)
    }

    /// The validated model.
    pub fn model(&self) -> Result<Model, ConfigError> {
        let m = self.model.build()?;
        let violations = validate(&m);
        if violations.is_empty() {
            Ok(m)
        } else {
            Err(ConfigError::Invalid(violations))
        }
    }

    /// Resolved configuration as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Comment block opening every output file.
    pub fn header(&self, command: &str) -> String {
        let mut out = format!("# competition {} {command}\n", env!("CARGO_PKG_VERSION"));
        for line in self.to_toml().lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

impl ModelConfig {
    fn keys(&self) -> [(&'static str, bool); 20] {
        [
            ("lambda1", self.lambda1.is_some()),
            ("lambda2", self.lambda2.is_some()),
            ("alpha1", self.alpha1.is_some()),
            ("alpha2", self.alpha2.is_some()),
            ("beta1", self.beta1.is_some()),
            ("beta2", self.beta2.is_some()),
            ("strict", self.strict.is_some()),
            ("g1_scale", self.g1_scale.is_some()),
            ("g1_index", self.g1_index.is_some()),
            ("g1_log", self.g1_log.is_some()),
            ("g2_scale", self.g2_scale.is_some()),
            ("g2_index", self.g2_index.is_some()),
            ("g2_log", self.g2_log.is_some()),
            ("alpha", self.alpha.is_some()),
            ("beta", self.beta.is_some()),
            ("a", self.a.is_some()),
            ("b", self.b.is_some()),
            ("gamma", self.gamma.is_some()),
            ("delta", self.delta.is_some()),
            ("epsilon", self.epsilon.is_some()),
        ]
    }

    fn allowed(&self) -> &'static [&'static str] {
        match self.kind {
            ModelKind::TypeI => &[
                "lambda1", "lambda2", "alpha1", "alpha2", "g1_scale", "g1_index", "g1_log",
                "g2_scale", "g2_index", "g2_log",
            ],
            ModelKind::TypeII => &[
                "lambda1", "lambda2", "alpha1", "alpha2", "beta1", "beta2", "strict",
            ],
            ModelKind::Urn => &["alpha", "beta"],
            ModelKind::ReuterImmigrationDeath => &["a", "b", "gamma", "delta", "epsilon"],
        }
    }

    pub fn build(&self) -> Result<Model, ConfigError> {
        let kind = self.kind.name();
        if let Some((key, _)) = self
            .keys()
            .into_iter()
            .find(|(k, set)| *set && !self.allowed().contains(k))
        {
            return Err(ConfigError::NotApplicable { kind, key });
        }
        let need = |v: Option<f64>, key: &'static str| v.ok_or(ConfigError::Missing { kind, key });
        Ok(match self.kind {
            ModelKind::TypeI => {
                let g = |scale: Option<f64>, index: Option<f64>, log: Option<f64>| {
                    InteractionFunction::new(
                        scale.unwrap_or(1.0),
                        index.unwrap_or(1.0),
                        log.unwrap_or(0.0),
                    )
                };
                Model::TypeI(TypeIModel {
                    lambda1: need(self.lambda1, "lambda1")?,
                    lambda2: need(self.lambda2, "lambda2")?,
                    alpha1: need(self.alpha1, "alpha1")?,
                    alpha2: need(self.alpha2, "alpha2")?,
                    g1: g(self.g1_scale, self.g1_index, self.g1_log),
                    g2: g(self.g2_scale, self.g2_index, self.g2_log),
                })
            }
            ModelKind::TypeII => {
                let mut m = TypeIIModel::new(
                    [
                        need(self.lambda1, "lambda1")?,
                        need(self.lambda2, "lambda2")?,
                    ],
                    [need(self.alpha1, "alpha1")?, need(self.alpha2, "alpha2")?],
                    [need(self.beta1, "beta1")?, need(self.beta2, "beta2")?],
                );
                m.strict = self.strict.unwrap_or(true);
                Model::TypeII(m)
            }
            ModelKind::Urn => Model::AuxUrn(AuxUrnModel::new(
                need(self.alpha, "alpha")?,
                need(self.beta, "beta")?,
            )),
            ModelKind::ReuterImmigrationDeath => Model::Reuter(ReuterModel::immigration_death(
                need(self.a, "a")?,
                need(self.b, "b")?,
                need(self.gamma, "gamma")?,
                need(self.delta, "delta")?,
                need(self.epsilon, "epsilon")?,
            )),
        })
    }
}
