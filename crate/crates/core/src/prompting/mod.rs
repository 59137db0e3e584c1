//! Translation and repair prompts, shot selection, and code extraction
//! from model responses.

mod extract;
mod shots;
mod template;

use serde::{Deserialize, Serialize};

use crate::api::{Api, Direction};
use crate::corpus::{count_tokens, TokenCounter};

pub use extract::extract_code;
pub use shots::select_shots;
pub use template::{render_placeholders, PromptTemplates};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Instruction,
    Assistant,
}

impl Role {
    pub fn label(self) -> &'static str {
        match self {
            Role::Instruction => "Instruction",
            Role::Assistant => "Assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub role: Role,
    pub text: String,
}

/// A system message plus an ordered conversation, ready for a chat backend.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system: String,
    pub turns: Vec<Turn>,
    pub rendered_token_estimate: usize,
}

impl PromptBundle {
    pub fn new(system: String, turns: Vec<Turn>) -> Self {
        let mut bundle = PromptBundle { system, turns, rendered_token_estimate: 0 };
        bundle.rendered_token_estimate = count_tokens(&bundle.transcript(), &TokenCounter::Approx);
        bundle
    }

    /// Canonical text form: one `Label: text` block per message, blocks
    /// separated by a blank line. Used for golden files, hashing and
    /// context estimates.
    pub fn transcript(&self) -> String {
        let mut blocks = Vec::with_capacity(self.turns.len() + 1);
        if !self.system.is_empty() {
            blocks.push(format!("System: {}\n", self.system));
        }
        for turn in &self.turns {
            blocks.push(format!("{}: {}\n", turn.role.label(), turn.text));
        }
        blocks.join("\n")
    }

    /// Text of the last instruction turn.
    pub fn final_instruction(&self) -> Option<&str> {
        self.turns
            .iter()
            .rev()
            .find(|t| t.role == Role::Instruction)
            .map(|t| t.text.as_str())
    }
}

/// One translation problem: translate `source_code` along `direction`;
/// `target_code` is the ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationTask {
    pub task_id: String,
    pub benchmark_id: String,
    pub direction: Direction,
    pub source_code: String,
    pub target_code: String,
    pub category: Option<String>,
}

impl TranslationTask {
    pub fn make_id(benchmark_id: &str, direction: Direction) -> String {
        format!("{direction}.{benchmark_id}")
    }
}

/// An in-context example pair for the same direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotExample {
    pub from_api: Api,
    pub to_api: Api,
    pub from_code: String,
    pub to_code: String,
    pub benchmark_id: String,
}

impl ShotExample {
    pub fn direction(&self) -> Direction {
        Direction::new(self.from_api, self.to_api)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairKind {
    Compile,
    Runtime,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("shot from {found} does not match task direction {expected}")]
    ShotDirectionMismatch { expected: Direction, found: Direction },
    #[error("need {needed} shot example(s) for {direction} but only {available} are available")]
    InsufficientShots { direction: Direction, needed: usize, available: usize },
    #[error("model returned an empty completion")]
    EmptyCompletion,
    #[error("template file {path}: {reason}")]
    Template { path: String, reason: String },
}

/// Builds the inference prompt: system line, then per shot an instruction
/// and an assistant turn, then the task's instruction.
pub fn render_translation_prompt(
    task: &TranslationTask,
    shots: &[ShotExample],
    templates: &PromptTemplates,
) -> Result<PromptBundle, PromptError> {
    let mut turns = Vec::with_capacity(2 * shots.len() + 1);
    for shot in shots {
        if shot.direction() != task.direction {
            return Err(PromptError::ShotDirectionMismatch {
                expected: task.direction,
                found: shot.direction(),
            });
        }
        turns.push(Turn {
            role: Role::Instruction,
            text: templates.instruction_text(shot.direction(), &shot.from_code),
        });
        turns.push(Turn { role: Role::Assistant, text: templates.shot_response_text(&shot.to_code) });
    }
    turns.push(Turn {
        role: Role::Instruction,
        text: templates.instruction_text(task.direction, &task.source_code),
    });
    Ok(PromptBundle::new(templates.system.clone(), turns))
}

/// Builds a repair prompt around the latest candidate code and the tail of
/// its diagnostics.
pub fn render_repair_prompt(
    kind: RepairKind,
    current_code: &str,
    diagnostics: &str,
    direction: Direction,
    templates: &PromptTemplates,
) -> PromptBundle {
    let text = templates.repair_text(kind, direction, current_code, diagnostics);
    PromptBundle::new(templates.system.clone(), vec![Turn { role: Role::Instruction, text }])
}
