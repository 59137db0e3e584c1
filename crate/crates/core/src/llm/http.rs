use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Backend, CallKey, GenerationConfig, LlmError};
use crate::prompting::{PromptBundle, Role};

pub const API_KEY_ENV: &str = "UNIPAR_API_KEY";
pub const API_BASE_ENV: &str = "UNIPAR_API_BASE";

/// OpenAI-style chat-completions endpoint description. Credentials are not
/// part of it; they come from the environment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HttpConfig {
    pub base_url: String,
    pub path: String,
    pub model: String,
    /// Header carrying the key, e.g. `Authorization` or `api-key`.
    pub auth_header: String,
    /// Prefix placed before the key in that header.
    pub auth_prefix: String,
    pub context_limit: Option<usize>,
    pub timeout_s: u64,
}

impl Default for HttpConfig {
    fn default() -> Self {
        HttpConfig {
            base_url: "https://api.openai.com".into(),
            path: "/v1/chat/completions".into(),
            model: "gpt-4o-mini".into(),
            auth_header: "Authorization".into(),
            auth_prefix: "Bearer ".into(),
            context_limit: None,
            timeout_s: 600,
        }
    }
}

#[derive(Debug)]
pub struct HttpBackend {
    config: HttpConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpBackend {
    pub fn new(config: HttpConfig, api_key: Option<String>) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(config.timeout_s)))
            .build()
            .into();
        HttpBackend { config, api_key, agent }
    }

    /// Applies `UNIPAR_API_BASE` over the configured base URL and reads the
    /// key from `UNIPAR_API_KEY`.
    pub fn from_env(mut config: HttpConfig) -> Result<Self, LlmError> {
        if let Ok(base) = std::env::var(API_BASE_ENV) {
            if !base.trim().is_empty() {
                config.base_url = base;
            }
        }
        let key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        if key.is_none() {
            return Err(LlmError::Config(format!("{API_KEY_ENV} is not set")));
        }
        Ok(HttpBackend::new(config, key))
    }

    pub fn url(&self) -> String {
        format!("{}{}", self.config.base_url.trim_end_matches('/'), self.config.path)
    }

    pub fn request_body(&self, bundle: &PromptBundle, gen: &GenerationConfig) -> Value {
        let mut messages = Vec::with_capacity(bundle.turns.len() + 1);
        if !bundle.system.is_empty() {
            messages.push(json!({"role": "system", "content": bundle.system}));
        }
        for turn in &bundle.turns {
            let role = match turn.role {
                Role::Instruction => "user",
                Role::Assistant => "assistant",
            };
            messages.push(json!({"role": role, "content": turn.text}));
        }
        let model = if gen.model_id.is_empty() { &self.config.model } else { &gen.model_id };
        json!({
            "model": model,
            "messages": messages,
            "temperature": gen.temperature,
            "top_p": gen.top_p,
            "max_tokens": gen.max_tokens,
        })
    }
}

impl Backend for HttpBackend {
    fn provider(&self) -> String {
        format!("http:{}", self.config.model)
    }

    fn context_limit(&self) -> Option<usize> {
        self.config.context_limit
    }

    fn send(&self, bundle: &PromptBundle, config: &GenerationConfig, _key: &CallKey) -> Result<String, LlmError> {
        let mut req = self.agent.post(&self.url());
        if let Some(key) = &self.api_key {
            req = req.header(&self.config.auth_header, &format!("{}{key}", self.config.auth_prefix));
        }
        let mut resp = req
            .send_json(self.request_body(bundle, config))
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        match status {
            200..=299 => {}
            429 => return Err(LlmError::RateLimited { attempts: 1 }),
            500..=599 => return Err(LlmError::Transport(format!("HTTP {status}"))),
            _ => return Err(LlmError::Http { status, body }),
        }
        let value: Value = serde_json::from_str(&body)
            .map_err(|e| LlmError::Http { status, body: format!("unparseable body: {e}") })?;
        value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or(LlmError::EmptyCompletion)
    }
}
