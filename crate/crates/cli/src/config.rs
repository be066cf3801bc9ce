//! Run configuration, layered as flags over environment over file over
//! defaults.

use std::path::{Path, PathBuf};

use plauscheck_core::harness::ModeSelection;
use thiserror::Error;
use toml::Value;

pub const ENV_PREFIX: &str = "PLAUSCHECK_";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("config key `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(key: &str, message: impl Into<String>) -> Self {
        Self {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Mock,
    Http,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub store: Option<PathBuf>,
    pub suite: Option<PathBuf>,
    pub backend: BackendKind,
    pub base_url: Option<String>,
    pub model: Option<String>,
    pub fixtures: Option<PathBuf>,
    pub k: u32,
    pub mode: ModeSelection,
    pub counter: String,
    /// Chunk size for `chunk` and `instruct`.
    pub max_tokens: usize,
    /// Completion length requested from the backend.
    pub completion_tokens: u32,
    pub temperature: f64,
    pub parallel: usize,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub seed: Option<u64>,
    pub normalize_ws: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            store: None,
            suite: None,
            backend: BackendKind::Mock,
            base_url: None,
            model: None,
            fixtures: None,
            k: 5,
            mode: ModeSelection::Both,
            counter: "approx-words".into(),
            max_tokens: 8192,
            completion_tokens: 1024,
            temperature: 0.7,
            parallel: 4,
            out: None,
            format: None,
            seed: None,
            normalize_ws: false,
        }
    }
}

/// Keys accepted in the file, the environment and on the command line.
pub const KEYS: &[&str] = &[
    "store",
    "suite",
    "backend",
    "base_url",
    "model",
    "fixtures",
    "k",
    "mode",
    "counter",
    "max_tokens",
    "completion_tokens",
    "temperature",
    "parallel",
    "out",
    "format",
    "seed",
    "normalize_ws",
];

/// One configuration source, as raw strings per key.
pub type Layer = Vec<(String, String)>;

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
            v.trim().parse().map_err(|_| ConfigError::new(key, format!("not a valid number: {v:?}")))
        }
        match key {
            "store" => self.store = Some(value.into()),
            "suite" => self.suite = Some(value.into()),
            "backend" => {
                self.backend = match value {
                    "mock" => BackendKind::Mock,
                    "http" => BackendKind::Http,
                    _ => return Err(ConfigError::new(key, format!("expected mock or http, got {value:?}"))),
                }
            }
            "base_url" => self.base_url = Some(value.into()),
            "model" => self.model = Some(value.into()),
            "fixtures" => self.fixtures = Some(value.into()),
            "k" => {
                self.k = num(key, value)?;
                if self.k == 0 {
                    return Err(ConfigError::new(key, "must be at least 1"));
                }
            }
            "mode" => self.mode = value.parse().map_err(|e: String| ConfigError::new(key, e))?,
            "counter" => self.counter = value.into(),
            "max_tokens" => {
                self.max_tokens = num(key, value)?;
                if self.max_tokens == 0 {
                    return Err(ConfigError::new(key, "must be at least 1"));
                }
            }
            "completion_tokens" => self.completion_tokens = num(key, value)?,
            "temperature" => self.temperature = num(key, value)?,
            "parallel" => self.parallel = num::<usize>(key, value)?.max(1),
            "out" => self.out = Some(value.into()),
            "format" => self.format = Some(value.into()),
            "seed" => self.seed = Some(num(key, value)?),
            "normalize_ws" => {
                self.normalize_ws = match value {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    _ => return Err(ConfigError::new(key, format!("expected a boolean, got {value:?}"))),
                }
            }
            _ => return Err(ConfigError::new(key, "unknown key")),
        }
        Ok(())
    }

    pub fn apply(&mut self, layer: &Layer) -> Result<(), ConfigError> {
        for (k, v) in layer {
            self.set(k, v)?;
        }
        Ok(())
    }
}

/// Reads a TOML config file into a layer. Keys are checked here so the
/// error names the file's offending key.
pub fn file_layer(path: &Path) -> Result<Layer, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("config", format!("reading {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::new("config", format!("{}: {}", path.display(), e.message())))?;
    let mut layer = Layer::new();
    for (key, value) in table {
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::new(&key, "unknown key"));
        }
        let raw = match value {
            Value::String(s) => s,
            Value::Integer(i) => i.to_string(),
            Value::Float(f) => f.to_string(),
            Value::Boolean(b) => b.to_string(),
            other => return Err(ConfigError::new(&key, format!("unsupported value {other}"))),
        };
        layer.push((key, raw));
    }
    Ok(layer)
}

/// Settings from `PLAUSCHECK_<KEY>` variables, looked up through `lookup`.
pub fn env_layer(lookup: impl Fn(&str) -> Option<String>) -> Layer {
    KEYS.iter()
        .filter_map(|key| {
            let name = format!("{ENV_PREFIX}{}", key.to_ascii_uppercase());
            lookup(&name).map(|v| (key.to_string(), v))
        })
        .collect()
}

/// Builds the run configuration from defaults, then the file, then the
/// environment, then `flags`.
pub fn load_config(
    file: Option<&Path>,
    env: impl Fn(&str) -> Option<String>,
    flags: &Layer,
) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::default();
    if let Some(path) = file {
        config.apply(&file_layer(path)?)?;
    }
    config.apply(&env_layer(env))?;
    config.apply(flags)?;
    Ok(config)
}
