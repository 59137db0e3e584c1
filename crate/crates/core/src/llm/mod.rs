//! Chat-completion backends behind one interface, with retries and a
//! persistent completion log.

mod http;
mod log;
mod mock;

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::corpus::{count_tokens, TokenCounter};
use crate::prompting::PromptBundle;
use crate::util::sha256_hex;

pub use http::{HttpBackend, HttpConfig, API_BASE_ENV, API_KEY_ENV};
pub use log::CompletionLog;
pub use mock::{MockBackend, ScriptedBehavior, UnmatchedPolicy};

/// Context length used when a backend does not state its own.
pub const DEFAULT_CONTEXT_TOKENS: usize = 16_384;

/// Decoding parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerationConfig {
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: usize,
    pub model_id: String,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig { temperature: 0.2, top_p: 0.9, max_tokens: 15_000, model_id: String::new() }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(format!("temperature must be >= 0, got {}", self.temperature));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(format!("top_p must be in (0, 1], got {}", self.top_p));
        }
        if self.max_tokens == 0 {
            return Err("max_tokens must be positive".into());
        }
        Ok(())
    }
}

/// Which step of a pipeline issued a call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Translate,
    CompileRepair,
    TransplantRepair,
    ExecRepair,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Translate => "translate",
            Stage::CompileRepair => "compile_repair",
            Stage::TransplantRepair => "transplant_repair",
            Stage::ExecRepair => "exec_repair",
        })
    }
}

impl std::str::FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "translate" => Ok(Stage::Translate),
            "compile_repair" => Ok(Stage::CompileRepair),
            "transplant_repair" => Ok(Stage::TransplantRepair),
            "exec_repair" => Ok(Stage::ExecRepair),
            _ => Err(format!("unknown stage `{s}`")),
        }
    }
}

/// Identifies a call within a run; the mock backend is keyed by it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CallKey {
    pub task_id: String,
    pub stage: Stage,
    pub round: u32,
}

impl CallKey {
    pub fn new(task_id: impl Into<String>, stage: Stage, round: u32) -> Self {
        CallKey { task_id: task_id.into(), stage, round }
    }
}

impl fmt::Display for CallKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.task_id, self.stage, self.round)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LlmError {
    #[error("rate limited after {attempts} attempt(s)")]
    RateLimited { attempts: u32 },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("prompt estimate {estimate} + max_tokens {max_tokens} exceeds context {limit}")]
    ContextOverflow { estimate: usize, max_tokens: usize, limit: usize },
    #[error("model returned an empty completion")]
    EmptyCompletion,
    #[error("no scripted response for {0}")]
    ScriptMiss(CallKey),
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("backend configuration: {0}")]
    Config(String),
}

impl LlmError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, LlmError::RateLimited { .. } | LlmError::Transport(_))
    }
}

/// A chat-completion provider. Implementations must tolerate concurrent calls.
pub trait Backend: Send + Sync {
    fn provider(&self) -> String;

    /// Total tokens (prompt + completion) the model accepts, if known.
    fn context_limit(&self) -> Option<usize> {
        None
    }

    /// One attempt; retries are handled by [`LlmClient`].
    fn send(&self, bundle: &PromptBundle, config: &GenerationConfig, key: &CallKey) -> Result<String, LlmError>;
}

/// One logged `complete` call, successful or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub key: CallKey,
    pub prompt_hash: String,
    pub response: String,
    pub latency_ms: u64,
    pub provider: String,
    pub config: GenerationConfig,
    pub attempts: u32,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub backoff_base_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_retries: 3, backoff_base_ms: 2000 }
    }
}

impl RetryPolicy {
    pub fn delay(&self, retry: u32) -> Duration {
        Duration::from_millis(self.backoff_base_ms.saturating_mul(1u64 << retry.min(16)))
    }
}

pub fn prompt_hash(bundle: &PromptBundle) -> String {
    sha256_hex(bundle.transcript().as_bytes())
}

/// Tokens in the bundle's canonical transcript.
pub fn estimate_context(bundle: &PromptBundle, counter: &TokenCounter) -> usize {
    count_tokens(&bundle.transcript(), counter)
}

/// A backend plus retry policy and completion log.
#[derive(Clone)]
pub struct LlmClient {
    backend: Arc<dyn Backend>,
    log: Arc<CompletionLog>,
    retry: RetryPolicy,
    counter: TokenCounter,
}

impl fmt::Debug for LlmClient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LlmClient")
            .field("provider", &self.backend.provider())
            .field("retry", &self.retry)
            .finish()
    }
}

impl LlmClient {
    pub fn new(backend: Arc<dyn Backend>, log: Arc<CompletionLog>) -> Self {
        LlmClient { backend, log, retry: RetryPolicy::default(), counter: TokenCounter::Approx }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn log(&self) -> &Arc<CompletionLog> {
        &self.log
    }

    pub fn provider(&self) -> String {
        self.backend.provider()
    }

    /// Sends `bundle`, retrying transient failures, and logs exactly one
    /// record for the call.
    pub fn complete(&self, bundle: &PromptBundle, config: &GenerationConfig, key: &CallKey) -> Result<String, LlmError> {
        let started = Instant::now();
        let mut attempts = 0;
        let result = self.attempt_all(bundle, config, key, &mut attempts);
        let (response, error) = match &result {
            Ok(text) => (text.clone(), None),
            Err(e) => (String::new(), Some(e.to_string())),
        };
        self.log.append(CompletionRecord {
            key: key.clone(),
            prompt_hash: prompt_hash(bundle),
            response,
            latency_ms: started.elapsed().as_millis() as u64,
            provider: self.backend.provider(),
            config: config.clone(),
            attempts,
            error,
        });
        result
    }

    fn attempt_all(
        &self,
        bundle: &PromptBundle,
        config: &GenerationConfig,
        key: &CallKey,
        attempts: &mut u32,
    ) -> Result<String, LlmError> {
        if let Some(limit) = self.backend.context_limit() {
            let estimate = estimate_context(bundle, &self.counter);
            if estimate + config.max_tokens > limit {
                return Err(LlmError::ContextOverflow { estimate, max_tokens: config.max_tokens, limit });
            }
        }
        loop {
            *attempts += 1;
            match self.backend.send(bundle, config, key) {
                Ok(text) if text.trim().is_empty() => return Err(LlmError::EmptyCompletion),
                Ok(text) => return Ok(text),
                Err(e) if e.is_retryable() && *attempts <= self.retry.max_retries => {
                    let delay = self.retry.delay(*attempts - 1);
                    tracing::warn!("{key}: {e}; retrying in {delay:?}");
                    std::thread::sleep(delay);
                }
                Err(LlmError::RateLimited { .. }) => return Err(LlmError::RateLimited { attempts: *attempts }),
                Err(e) => return Err(e),
            }
        }
    }
}
