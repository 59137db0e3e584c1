use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Backend, CallKey, GenerationConfig, LlmError, Stage};
use crate::prompting::PromptBundle;

/// One line of a mock script file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptedBehavior {
    pub task_id: String,
    pub stage: Stage,
    pub round: u32,
    pub response: String,
}

/// What the mock does for a call with no scripted response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnmatchedPolicy {
    #[default]
    Error,
    /// Return the code from the final instruction (the text after `Code: `).
    EchoInput,
}

/// Deterministic backend answering from a script keyed by (task, stage, round).
#[derive(Debug, Clone, Default)]
pub struct MockBackend {
    script: HashMap<CallKey, String>,
    policy: UnmatchedPolicy,
}

impl MockBackend {
    pub fn new(entries: Vec<ScriptedBehavior>, policy: UnmatchedPolicy) -> Result<Self, LlmError> {
        let mut script = HashMap::with_capacity(entries.len());
        for e in entries {
            let key = CallKey::new(e.task_id, e.stage, e.round);
            if script.insert(key.clone(), e.response).is_some() {
                return Err(LlmError::Config(format!("duplicate script key {key}")));
            }
        }
        Ok(MockBackend { script, policy })
    }

    pub fn parse_jsonl(text: &str) -> Result<Vec<ScriptedBehavior>, LlmError> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| LlmError::Config(format!("script line {}: {e}", i + 1)))
            })
            .collect()
    }

    pub fn from_file(path: &Path, policy: UnmatchedPolicy) -> Result<Self, LlmError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LlmError::Config(format!("{}: {e}", path.display())))?;
        Self::new(Self::parse_jsonl(&text)?, policy)
    }

    pub fn to_jsonl(entries: &[ScriptedBehavior]) -> String {
        entries
            .iter()
            .map(|e| serde_json::to_string(e).expect("serializes") + "\n")
            .collect()
    }

    pub fn len(&self) -> usize {
        self.script.len()
    }

    pub fn is_empty(&self) -> bool {
        self.script.is_empty()
    }
}

impl Backend for MockBackend {
    fn provider(&self) -> String {
        "mock".into()
    }

    fn send(&self, bundle: &PromptBundle, _config: &GenerationConfig, key: &CallKey) -> Result<String, LlmError> {
        if let Some(text) = self.script.get(key) {
            return Ok(text.clone());
        }
        match self.policy {
            UnmatchedPolicy::Error => Err(LlmError::ScriptMiss(key.clone())),
            UnmatchedPolicy::EchoInput => {
                let last = bundle.final_instruction().unwrap_or_default();
                Ok(match last.find("Code: ") {
                    Some(i) => last[i + "Code: ".len()..].to_string(),
                    None => last.to_string(),
                })
            }
        }
    }
}
