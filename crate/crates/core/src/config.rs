//! Application configuration file (TOML). Unknown keys are rejected so a
//! typo never silently falls back to a default.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::agents::PipelineConfig;
use crate::api::Direction;
use crate::corpus::{ScanConfig, SplitRatio, TokenCounter, Vocabulary, DEFAULT_TOKEN_CUTOFF};
use crate::llm::{Backend, HttpBackend, HttpConfig, LlmError, MockBackend, RetryPolicy, UnmatchedPolicy, DEFAULT_CONTEXT_TOKENS};
use crate::metrics::SweepSpec;
use crate::toolchain::{DetectorConfig, ToolchainConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CounterKind {
    #[default]
    Approx,
    Vocab,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusSection {
    /// Benchmark tree to curate from.
    pub root: Option<PathBuf>,
    /// Curated corpus directory.
    pub out: PathBuf,
    pub cutoff: usize,
    pub counter: CounterKind,
    pub vocab: Option<PathBuf>,
    pub derive_serial: bool,
    pub verify: bool,
    /// Optional `id -> category` sidecar.
    pub categories: Option<PathBuf>,
    pub scan: ScanConfig,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection {
            root: None,
            out: "corpus".into(),
            cutoff: DEFAULT_TOKEN_CUTOFF,
            counter: CounterKind::Approx,
            vocab: None,
            derive_serial: true,
            verify: true,
            categories: None,
            scan: ScanConfig::default(),
        }
    }
}

impl CorpusSection {
    pub fn token_counter(&self) -> Result<TokenCounter, crate::corpus::CorpusError> {
        match self.counter {
            CounterKind::Approx => Ok(TokenCounter::Approx),
            CounterKind::Vocab => {
                let path = self.vocab.clone().unwrap_or_else(|| PathBuf::from("vocab.json"));
                Ok(TokenCounter::Vocab(Arc::new(Vocabulary::load(&path)?)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSection {
    /// `9:1` or a train fraction such as `0.9`.
    pub ratio: String,
    pub path: PathBuf,
    /// Empty means every standard direction present in the corpus.
    pub directions: Vec<Direction>,
}

impl Default for SplitSection {
    fn default() -> Self {
        SplitSection { ratio: "9:1".into(), path: "split.json".into(), directions: Vec::new() }
    }
}

/// Where completions come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BackendSpec {
    Mock {
        script: Option<PathBuf>,
        #[serde(default)]
        unmatched: UnmatchedPolicy,
    },
    Http(HttpConfig),
}

impl Default for BackendSpec {
    fn default() -> Self {
        BackendSpec::Mock { script: None, unmatched: UnmatchedPolicy::EchoInput }
    }
}

impl BackendSpec {
    /// Parses the command-line form: `mock:<script.jsonl>`, `echo`, `http` or
    /// `http:<model>`.
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        if let Some(path) = s.strip_prefix("mock:") {
            return Ok(BackendSpec::Mock { script: Some(path.into()), unmatched: UnmatchedPolicy::Error });
        }
        if s == "echo" {
            return Ok(BackendSpec::Mock { script: None, unmatched: UnmatchedPolicy::EchoInput });
        }
        if s == "http" {
            return Ok(BackendSpec::Http(HttpConfig::default()));
        }
        if let Some(model) = s.strip_prefix("http:") {
            return Ok(BackendSpec::Http(HttpConfig { model: model.into(), ..Default::default() }));
        }
        Err(ConfigError::Invalid(format!(
            "unknown backend `{s}` (expected mock:<file>, echo, http or http:<model>)"
        )))
    }

    pub fn build(&self) -> Result<Arc<dyn Backend>, LlmError> {
        Ok(match self {
            BackendSpec::Mock { script: Some(path), unmatched } => Arc::new(MockBackend::from_file(path, *unmatched)?),
            BackendSpec::Mock { script: None, unmatched } => Arc::new(MockBackend::new(Vec::new(), *unmatched)?),
            BackendSpec::Http(cfg) => Arc::new(HttpBackend::from_env(cfg.clone())?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackendsSection {
    pub questioner: BackendSpec,
    /// Defaults to the questioner.
    pub repair: Option<BackendSpec>,
    pub retry: RetryPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FinetuneSection {
    pub context_limit: usize,
    pub drop_over_context: bool,
}

impl Default for FinetuneSection {
    fn default() -> Self {
        FinetuneSection { context_limit: DEFAULT_CONTEXT_TOKENS, drop_over_context: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AppConfig {
    pub run_id: Option<String>,
    pub seed: u64,
    pub parallelism: usize,
    pub runs_dir: PathBuf,
    /// Directory of prompt template overrides.
    pub templates_dir: Option<PathBuf>,
    pub corpus: CorpusSection,
    pub split: SplitSection,
    pub toolchain: ToolchainConfig,
    pub detector: DetectorConfig,
    pub backends: BackendsSection,
    pub pipeline: PipelineConfig,
    pub sweep: SweepSpec,
    pub finetune: FinetuneSection,
}

impl Default for AppConfig {
    fn default() -> Self {
        AppConfig {
            run_id: None,
            seed: 0,
            parallelism: 1,
            runs_dir: "runs".into(),
            templates_dir: None,
            corpus: CorpusSection::default(),
            split: SplitSection::default(),
            toolchain: ToolchainConfig::default(),
            detector: DetectorConfig::default(),
            backends: BackendsSection::default(),
            pipeline: PipelineConfig::default(),
            sweep: SweepSpec::default(),
            finetune: FinetuneSection::default(),
        }
    }
}

impl AppConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        let config: AppConfig = toml::from_str(text)
            .map_err(|e| ConfigError::Parse { path: origin.to_path_buf(), message: e.to_string() })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.to_path_buf(), source: e })?;
        Self::parse(&text, path)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.pipeline.validate().map_err(ConfigError::Invalid)?;
        self.split_ratio()?;
        if self.parallelism == 0 {
            return Err(ConfigError::Invalid("parallelism must be at least 1".into()));
        }
        if self.sweep.temperatures.is_empty() || self.sweep.max_tokens.is_empty() || self.sweep.shots.is_empty() {
            return Err(ConfigError::Invalid("sweep lists must not be empty".into()));
        }
        Ok(())
    }

    pub fn split_ratio(&self) -> Result<SplitRatio, ConfigError> {
        self.split.ratio.parse().map_err(|_| ConfigError::Invalid(format!("bad split ratio `{}`", self.split.ratio)))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// JSON snapshot embedded in run manifests. Holds no credentials.
    pub fn snapshot(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
