use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{PromptError, RepairKind};
use crate::api::Direction;
use crate::util::tail;

pub const SYSTEM: &str =
    "You are an HPC expert specializing in translating between parallel programming APIs.";
pub const INSTRUCTION: &str = "Translate the following code from {from_api} to {to_api}\nCode: {from_code}";
pub const SHOT_RESPONSE: &str = "Here is the translated code: {to_code}";
/// Response field of fine-tuning records.
pub const FINETUNE_RESPONSE: &str = "{to_code}";
pub const COMPILE_REPAIR: &str = "The following {to_api} code fails to compile.\n\
Code: {code}\n\
Compiler diagnostics:\n{diagnostics}\n\
Fix the errors and return the complete corrected {to_api} code only.";
pub const RUNTIME_REPAIR: &str = "The following {to_api} code compiles but does not run correctly.\n\
Code: {code}\n\
Observed behavior:\n{diagnostics}\n\
Fix the errors and return the complete corrected {to_api} code only.";

pub const DEFAULT_DIAGNOSTICS_BUDGET: usize = 16 * 1024;

/// Prompt text templates with `{placeholder}` substitution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PromptTemplates {
    pub system: String,
    pub instruction: String,
    pub shot_response: String,
    pub finetune_response: String,
    pub compile_repair: String,
    pub runtime_repair: String,
    /// Diagnostics longer than this many bytes keep only their tail.
    pub diagnostics_budget: usize,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates {
            system: SYSTEM.into(),
            instruction: INSTRUCTION.into(),
            shot_response: SHOT_RESPONSE.into(),
            finetune_response: FINETUNE_RESPONSE.into(),
            compile_repair: COMPILE_REPAIR.into(),
            runtime_repair: RUNTIME_REPAIR.into(),
            diagnostics_budget: DEFAULT_DIAGNOSTICS_BUDGET,
        }
    }
}

const OVERRIDE_FILES: [&str; 6] = [
    "system.txt",
    "instruction.txt",
    "shot_response.txt",
    "finetune_response.txt",
    "compile_repair.txt",
    "runtime_repair.txt",
];

impl PromptTemplates {
    /// Starts from the defaults and replaces every template that has a
    /// matching `<name>.txt` in `dir`. A single trailing newline is dropped.
    pub fn with_overrides(dir: &Path) -> Result<Self, PromptError> {
        let mut t = PromptTemplates::default();
        for name in OVERRIDE_FILES {
            let path = dir.join(name);
            if !path.is_file() {
                continue;
            }
            let text = std::fs::read_to_string(&path).map_err(|e| PromptError::Template {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            let text = text.strip_suffix('\n').unwrap_or(&text).to_string();
            let slot = match name {
                "system.txt" => &mut t.system,
                "instruction.txt" => &mut t.instruction,
                "shot_response.txt" => &mut t.shot_response,
                "finetune_response.txt" => &mut t.finetune_response,
                "compile_repair.txt" => &mut t.compile_repair,
                _ => &mut t.runtime_repair,
            };
            *slot = text;
        }
        Ok(t)
    }

    pub fn instruction_text(&self, direction: Direction, from_code: &str) -> String {
        render_placeholders(
            &self.instruction,
            &[
                ("from_api", direction.from.display_name()),
                ("to_api", direction.to.display_name()),
                ("from_code", from_code),
            ],
        )
    }

    pub fn shot_response_text(&self, to_code: &str) -> String {
        render_placeholders(&self.shot_response, &[("to_code", to_code)])
    }

    pub fn finetune_response_text(&self, to_code: &str) -> String {
        render_placeholders(&self.finetune_response, &[("to_code", to_code)])
    }

    pub fn repair_text(&self, kind: RepairKind, direction: Direction, code: &str, diagnostics: &str) -> String {
        let template = match kind {
            RepairKind::Compile => &self.compile_repair,
            RepairKind::Runtime => &self.runtime_repair,
        };
        let kept = tail(diagnostics, self.diagnostics_budget);
        let diagnostics = if kept.len() < diagnostics.len() {
            format!("[... {} earlier bytes omitted ...]\n{kept}", diagnostics.len() - kept.len())
        } else if diagnostics.trim().is_empty() {
            "(no diagnostics captured)".to_string()
        } else {
            kept.to_string()
        };
        render_placeholders(
            template,
            &[
                ("from_api", direction.from.display_name()),
                ("to_api", direction.to.display_name()),
                ("code", code),
                ("diagnostics", &diagnostics),
            ],
        )
    }
}

/// Single-pass `{name}` substitution. Unknown names and other braces are
/// copied through, and substituted values are never re-expanded.
pub fn render_placeholders(template: &str, values: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let replaced = after.find('}').and_then(|close| {
            let name = &after[..close];
            values.iter().find(|(k, _)| *k == name).map(|(_, v)| (close, *v))
        });
        match replaced {
            Some((close, value)) => {
                out.push_str(value);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}
