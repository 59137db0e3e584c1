use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agents::{translation_tasks, Partition};
use crate::api::Direction;
use crate::corpus::{KernelTuple, SplitManifest, TokenCounter};
use crate::llm::{estimate_context, DEFAULT_CONTEXT_TOKENS};
use crate::prompting::{PromptBundle, PromptTemplates, Role, Turn};
use crate::util::write_atomic;

/// JSON Schema every exported record satisfies.
pub const FINETUNE_SCHEMA: &str = include_str!("../../schema/finetune.schema.json");

#[derive(Debug, Clone)]
pub struct FinetuneOptions {
    pub templates: PromptTemplates,
    pub counter: TokenCounter,
    pub context_limit: usize,
    /// Leave out records over `context_limit` instead of only flagging them.
    pub drop_over_context: bool,
    /// Empty means every direction in the split.
    pub directions: Vec<Direction>,
}

impl Default for FinetuneOptions {
    fn default() -> Self {
        FinetuneOptions {
            templates: PromptTemplates::default(),
            counter: TokenCounter::Approx,
            context_limit: DEFAULT_CONTEXT_TOKENS,
            drop_over_context: false,
            directions: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinetuneRecord {
    pub task_id: String,
    pub system: String,
    pub instruction: String,
    pub response: String,
    pub token_estimate: usize,
    pub over_context: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FinetuneExport {
    pub records: Vec<FinetuneRecord>,
    /// Task ids over the context limit (kept or dropped).
    pub over_context: Vec<String>,
    pub dropped: usize,
    pub warnings: Vec<String>,
}

impl FinetuneExport {
    pub fn to_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
            .collect()
    }
}

/// One instruction/response record per train-split pair.
pub fn export_finetune(tuples: &[KernelTuple], split: &SplitManifest, options: &FinetuneOptions) -> FinetuneExport {
    let (tasks, warnings) = translation_tasks(tuples, split, &options.directions, Partition::Train);
    let mut export = FinetuneExport { warnings, ..Default::default() };
    for task in tasks {
        let instruction = options.templates.instruction_text(task.direction, &task.source_code);
        let response = options.templates.finetune_response_text(&task.target_code);
        let bundle = PromptBundle::new(
            options.templates.system.clone(),
            vec![
                Turn { role: Role::Instruction, text: instruction.clone() },
                Turn { role: Role::Assistant, text: response.clone() },
            ],
        );
        let token_estimate = estimate_context(&bundle, &options.counter);
        let over_context = token_estimate > options.context_limit;
        if over_context {
            export.over_context.push(task.task_id.clone());
            if options.drop_over_context {
                export.dropped += 1;
                continue;
            }
        }
        export.records.push(FinetuneRecord {
            task_id: task.task_id,
            system: options.templates.system.clone(),
            instruction,
            response,
            token_estimate,
            over_context,
        });
    }
    export
}

/// Writes `finetune.jsonl` and `finetune.schema.json` into `dir`.
pub fn write_finetune(export: &FinetuneExport, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    write_atomic(&dir.join("finetune.jsonl"), export.to_jsonl().as_bytes())?;
    write_atomic(&dir.join("finetune.schema.json"), FINETUNE_SCHEMA.as_bytes())
}
